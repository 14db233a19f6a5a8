#include "qpp/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "qpp/error.hpp"

namespace qpp {

QueryId parse_query_id(std::string_view raw) {
  if (raw.empty())
    throw InputError("empty query id");
  QueryId id{std::string(raw), std::nullopt, std::string(raw)};
  auto underscore = raw.rfind('_');
  if (underscore == std::string_view::npos || underscore == 0)
    return id;
  std::string_view suffix = raw.substr(underscore + 1);
  if (suffix.empty() || suffix.front() == '0')
    return id;
  if (!std::all_of(suffix.begin(), suffix.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    return id;
  int turn = 0;
  auto [ptr, ec] =
      std::from_chars(suffix.data(), suffix.data() + suffix.size(), turn);
  if (ec != std::errc() || ptr != suffix.data() + suffix.size())
    return id;
  id.topic = std::string(raw.substr(0, underscore));
  id.turn = turn;
  return id;
}

namespace {
bool blank(const std::string &s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}
} // namespace

Query::Query(QueryId id_, std::string text_, std::size_t term_count_)
    : id(std::move(id_)), text(std::move(text_)), term_count(term_count_) {
  if (blank(text))
    throw InputError("query " + id.raw + " has empty text");
  if (term_count == 0)
    throw InputError("query " + id.raw + " has no tokens");
}

RankedList::RankedList(QueryId query_id, std::vector<ScoredDoc> docs)
    : query_id_(std::move(query_id)), docs_(std::move(docs)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(docs_.size());
  for (const auto &doc : docs_) {
    if (doc.doc_id.empty())
      throw InputError("empty doc id in list for query " + query_id_.raw);
    if (!std::isfinite(doc.score))
      throw InputError("non-finite score for doc " + doc.doc_id +
                       " in query " + query_id_.raw);
    if (!seen.insert(doc.doc_id).second)
      throw InputError("duplicate doc " + doc.doc_id + " for query " +
                       query_id_.raw);
  }
  std::sort(docs_.begin(), docs_.end(),
            [](const ScoredDoc &a, const ScoredDoc &b) {
              if (a.score != b.score)
                return a.score > b.score;
              return a.doc_id < b.doc_id;
            });
  for (std::size_t i = 0; i < docs_.size(); ++i)
    docs_[i].rank = i + 1;
}

std::vector<double> RankedList::scores(std::size_t limit) const {
  std::size_t n = std::min(limit, docs_.size());
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(docs_[i].score);
  return out;
}

RankedList RankedList::shifted(double shift) const {
  std::vector<ScoredDoc> docs = docs_;
  for (auto &doc : docs)
    doc.score += shift;
  return RankedList(query_id_, std::move(docs));
}

void Qrels::add(const QueryId &query_id, const std::string &doc_id,
                int grade) {
  if (grade < 0)
    throw InputError("negative relevance grade for " + query_id.raw + "/" +
                     doc_id);
  if (doc_id.empty())
    throw InputError("empty doc id in judgments for " + query_id.raw);
  auto &grades = by_query_[query_id];
  auto [it, inserted] = grades.emplace(doc_id, grade);
  if (inserted) {
    ++count_;
    return;
  }
  if (it->second != grade)
    throw InputError("conflicting grades for " + query_id.raw + "/" + doc_id +
                     ": " + std::to_string(it->second) + " vs " +
                     std::to_string(grade));
}

std::optional<int> Qrels::grade(const QueryId &query_id,
                                const std::string &doc_id) const {
  auto q = by_query_.find(query_id);
  if (q == by_query_.end())
    return std::nullopt;
  auto d = q->second.find(doc_id);
  if (d == q->second.end())
    return std::nullopt;
  return d->second;
}

const Qrels::DocGrades *Qrels::judgments_for(const QueryId &query_id) const {
  auto q = by_query_.find(query_id);
  return q == by_query_.end() ? nullptr : &q->second;
}

std::set<QueryId> Qrels::judged_queries() const {
  std::set<QueryId> out;
  for (const auto &[id, grades] : by_query_)
    if (!grades.empty())
      out.insert(id);
  return out;
}

PredictionRecord::PredictionRecord(QueryId query_id_, std::string predictor_,
                                   double value_)
    : query_id(std::move(query_id_)), predictor(std::move(predictor_)),
      value(value_) {
  if (!std::isfinite(value))
    throw InputError("non-finite prediction for " + query_id.raw);
}

ActualRecord::ActualRecord(QueryId query_id_, std::string metric_,
                           double value_)
    : query_id(std::move(query_id_)), metric(std::move(metric_)),
      value(value_) {
  if (!(value >= 0.0 && value <= 1.0))
    throw InputError("actual " + metric + " for " + query_id.raw +
                     " outside [0,1]");
}

} // namespace qpp
