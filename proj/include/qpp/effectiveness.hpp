#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/data_model.hpp"

namespace qpp {

enum class MetricKind { ndcg, recall };
enum class Gain { linear, exponential };

struct MetricSpec {
  MetricKind kind = MetricKind::ndcg;
  std::size_t cutoff = 3;
  int relevance_threshold = 1; // recall only
  Gain gain = Gain::linear;    // ndcg only

  // "ndcg@3", "recall@100".
  std::string name() const;
  // Throws InputError on anything else.
  static MetricSpec parse(std::string_view text);
};

// trec_eval ndcg_cut: gain(grade) / log2(rank + 1), ideal ordering from all
// judged grades of the query. nullopt if the query has no positive judgment.
std::optional<double> ndcg_at_k(const RankedList &list, const Qrels &qrels,
                                std::size_t k, Gain gain = Gain::linear);

// nullopt if no document reaches `threshold`.
std::optional<double> recall_at_k(const RankedList &list, const Qrels &qrels,
                                  std::size_t k, int threshold = 1);

struct ActualsResult {
  std::string metric;
  std::vector<ActualRecord> records; // sorted by query id
  std::size_t unjudged = 0;
  std::optional<double> mean; // absent when no query was judged
};

ActualsResult actuals_for_run(const RunSet &run, const Qrels &qrels,
                              const MetricSpec &spec);

// `qid<TAB>metric<TAB>value` rows, then `ALL<TAB>metric<TAB>mean`.
void write_actuals(std::ostream &out, const ActualsResult &actuals);

} // namespace qpp
