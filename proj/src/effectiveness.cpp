#include "qpp/effectiveness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>

#include "qpp/error.hpp"
#include "qpp/ingest.hpp"

namespace qpp {

std::string MetricSpec::name() const {
  return std::string(kind == MetricKind::ndcg ? "ndcg" : "recall") + "@" +
         std::to_string(cutoff);
}

MetricSpec MetricSpec::parse(std::string_view text) {
  auto at = text.find('@');
  if (at == std::string_view::npos)
    throw InputError("metric must look like ndcg@K or recall@K: " +
                     std::string(text));
  MetricSpec spec;
  auto kind = text.substr(0, at);
  if (kind == "ndcg")
    spec.kind = MetricKind::ndcg;
  else if (kind == "recall")
    spec.kind = MetricKind::recall;
  else
    throw InputError("unknown metric " + std::string(kind));
  auto k = text.substr(at + 1);
  auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), spec.cutoff);
  if (k.empty() || ec != std::errc() || ptr != k.data() + k.size() ||
      spec.cutoff == 0)
    throw InputError("metric cutoff must be a positive integer: " +
                     std::string(text));
  return spec;
}

namespace {
double gain_of(int grade, Gain gain) {
  if (gain == Gain::exponential)
    return std::exp2(static_cast<double>(grade)) - 1.0;
  return static_cast<double>(grade);
}
} // namespace

std::optional<double> ndcg_at_k(const RankedList &list, const Qrels &qrels,
                                std::size_t k, Gain gain) {
  const auto *judged = qrels.judgments_for(list.query_id());
  if (!judged)
    return std::nullopt;
  std::vector<int> grades;
  for (const auto &[doc, grade] : *judged)
    if (grade > 0)
      grades.push_back(grade);
  if (grades.empty())
    return std::nullopt;
  std::sort(grades.begin(), grades.end(), std::greater<>());

  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i)
    ideal += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);

  double dcg = 0.0;
  auto docs = list.docs();
  for (std::size_t i = 0; i < std::min(k, docs.size()); ++i) {
    auto it = judged->find(docs[i].doc_id);
    if (it == judged->end() || it->second <= 0)
      continue;
    dcg += gain_of(it->second, gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return std::min(1.0, dcg / ideal);
}

std::optional<double> recall_at_k(const RankedList &list, const Qrels &qrels,
                                  std::size_t k, int threshold) {
  const auto *judged = qrels.judgments_for(list.query_id());
  if (!judged)
    return std::nullopt;
  std::size_t relevant = 0;
  for (const auto &[doc, grade] : *judged)
    if (grade >= threshold)
      ++relevant;
  if (relevant == 0)
    return std::nullopt;
  std::size_t found = 0;
  auto docs = list.docs();
  for (std::size_t i = 0; i < std::min(k, docs.size()); ++i) {
    auto it = judged->find(docs[i].doc_id);
    if (it != judged->end() && it->second >= threshold)
      ++found;
  }
  return static_cast<double>(found) / static_cast<double>(relevant);
}

ActualsResult actuals_for_run(const RunSet &run, const Qrels &qrels,
                              const MetricSpec &spec) {
  ActualsResult result;
  result.metric = spec.name();
  double sum = 0.0;
  for (const auto &[id, list] : run) {
    std::optional<double> value =
        spec.kind == MetricKind::ndcg
            ? ndcg_at_k(list, qrels, spec.cutoff, spec.gain)
            : recall_at_k(list, qrels, spec.cutoff, spec.relevance_threshold);
    if (!value) {
      ++result.unjudged;
      continue;
    }
    sum += *value;
    result.records.emplace_back(id, result.metric, *value);
  }
  if (!result.records.empty())
    result.mean = sum / static_cast<double>(result.records.size());
  return result;
}

void write_actuals(std::ostream &out, const ActualsResult &actuals) {
  for (const auto &r : actuals.records)
    out << r.query_id.raw << '\t' << r.metric << '\t' << format_double(r.value)
        << '\n';
  if (actuals.mean)
    out << "ALL\t" << actuals.metric << '\t' << format_double(*actuals.mean)
        << '\n';
}

} // namespace qpp
