#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qpp {

// A query identifier. CAsT-style ids look like `<topic>_<turn>`; anything
// else is an opaque topic without a turn.
struct QueryId {
  std::string topic;
  std::optional<int> turn;
  std::string raw;

  // Identity and ordering are defined by the raw string alone.
  bool operator==(const QueryId &other) const { return raw == other.raw; }
  std::strong_ordering operator<=>(const QueryId &other) const {
    return raw <=> other.raw;
  }
};

// Splits at the last underscore when the suffix is a canonical positive
// integer (no sign, no leading zero). Throws InputError on an empty string.
QueryId parse_query_id(std::string_view raw);

struct Query {
  QueryId id;
  std::string text;
  std::size_t term_count = 0;

  Query(QueryId id, std::string text, std::size_t term_count);
};

struct ScoredDoc {
  std::string doc_id;
  std::size_t rank = 0;
  double score = 0.0;

  bool operator==(const ScoredDoc &) const = default;
};

// One query's result list in canonical order: score descending, ties by
// doc_id ascending, ranks 1..n. The rank field of the input is ignored.
class RankedList {
 public:
  RankedList() = default;
  RankedList(QueryId query_id, std::vector<ScoredDoc> docs);

  const QueryId &query_id() const noexcept { return query_id_; }
  std::span<const ScoredDoc> docs() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }

  // Scores of the first min(limit, size()) documents.
  std::vector<double> scores(std::size_t limit = static_cast<std::size_t>(-1)) const;

  // Returns a copy with `shift` added to every score.
  RankedList shifted(double shift) const;

  bool operator==(const RankedList &other) const = default;

 private:
  QueryId query_id_;
  std::vector<ScoredDoc> docs_;
};

using RunSet = std::map<QueryId, RankedList>;

// Graded relevance judgments. Grade-0 entries are kept: they mark documents
// judged non-relevant.
class Qrels {
 public:
  using DocGrades = std::map<std::string, int>;

  // Throws InputError on a negative grade or a conflicting re-judgment.
  void add(const QueryId &query_id, const std::string &doc_id, int grade);

  std::optional<int> grade(const QueryId &query_id,
                           const std::string &doc_id) const;
  // nullptr if the query has no judgments at all.
  const DocGrades *judgments_for(const QueryId &query_id) const;

  std::set<QueryId> judged_queries() const;
  std::size_t judgment_count() const noexcept { return count_; }
  const std::map<QueryId, DocGrades> &all() const noexcept { return by_query_; }

 private:
  std::map<QueryId, DocGrades> by_query_;
  std::size_t count_ = 0;
};

struct PredictionRecord {
  QueryId query_id;
  std::string predictor;
  double value = 0.0;

  PredictionRecord(QueryId query_id, std::string predictor, double value);
};

struct ActualRecord {
  QueryId query_id;
  std::string metric;
  double value = 0.0;

  ActualRecord(QueryId query_id, std::string metric, double value);
};

} // namespace qpp
