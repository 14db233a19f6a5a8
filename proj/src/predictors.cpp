#include "qpp/predictors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <thread>

#include "qpp/error.hpp"
#include "qpp/numeric.hpp"

namespace qpp {

void PredictorParams::validate() const {
  if (wig_k == 0 || nqc_k == 0 || smv_k == 0 || clarity_top_docs == 0 ||
      clarity_clip_terms == 0 || corpus_score_depth == 0)
    throw InputError("predictor cutoffs must be at least 1");
  if (!(sigma_x_percent > 0.0 && sigma_x_percent <= 100.0))
    throw InputError("sigma x percent must lie in (0, 100]");
}

namespace {

void require_list(const RankedList &list) {
  if (list.empty())
    throw InputError("empty ranked list for query " + list.query_id().raw);
}

void require_terms(const Query &query) {
  if (query.term_count == 0)
    throw InputError("query " + query.id.raw + " has no terms");
}

double normalizer(const PredictorContext &ctx, const char *predictor) {
  if (ctx.corpus_score == 0.0)
    throw DegenerateError(std::string(predictor) +
                          ": undefined normalization (corpus score is 0)");
  return ctx.params.strict_corpus_sign ? ctx.corpus_score
                                       : std::abs(ctx.corpus_score);
}

} // namespace

double corpus_score(const RankedList &list, std::size_t depth) {
  require_list(list);
  auto scores = list.scores(depth);
  return mean(scores);
}

double wig(const Query &query, const RankedList &list,
           const PredictorContext &ctx) {
  require_list(list);
  require_terms(query);
  auto top = list.scores(ctx.params.wig_k);
  double inv_sqrt_len = 1.0 / std::sqrt(static_cast<double>(query.term_count));
  double sum = 0.0;
  for (double s : top)
    sum += inv_sqrt_len * (s - ctx.corpus_score);
  return sum / static_cast<double>(top.size());
}

double nqc(const Query &, const RankedList &list,
           const PredictorContext &ctx) {
  require_list(list);
  double norm = normalizer(ctx, "NQC");
  auto top = list.scores(ctx.params.nqc_k);
  return population_std(top) / norm;
}

double sigma_max(const RankedList &list) {
  require_list(list);
  // Exact two-pass std at every prefix: O(n^2), n is at most a few thousand.
  auto scores = list.scores();
  double best = 0.0;
  for (std::size_t j = 1; j <= scores.size(); ++j)
    best = std::max(best, population_std(std::span(scores).first(j)));
  return best;
}

double n_sigma_x(const Query &query, const RankedList &list, double x_percent,
                 SigmaNormalization norm) {
  require_list(list);
  require_terms(query);
  if (!(x_percent > 0.0 && x_percent <= 100.0))
    throw InputError("x percent must lie in (0, 100]");
  auto scores = list.scores();
  if (scores.front() <= 0.0)
    throw DegenerateError(
        "x% threshold undefined for nonpositive head score");
  double threshold = x_percent / 100.0 * scores.front();
  std::size_t head = 0;
  while (head < scores.size() && scores[head] >= threshold)
    ++head;
  double sigma = population_std(std::span(scores).first(head));
  double len = static_cast<double>(query.term_count);
  return sigma / (norm == SigmaNormalization::query_length ? len
                                                            : std::sqrt(len));
}

double smv(const Query &, const RankedList &list,
           const PredictorContext &ctx) {
  require_list(list);
  auto top = list.scores(ctx.params.smv_k);
  for (double s : top)
    if (s <= 0.0)
      throw DegenerateError(
          "SMV requires positive scores (apply --score-shift)");
  double norm = normalizer(ctx, "SMV");
  double mu = mean(top);
  double sum = 0.0;
  for (double s : top)
    sum += s * std::abs(std::log(s / mu));
  return sum / static_cast<double>(top.size()) / norm;
}

double clarity(const Query &, const RankedList &list,
               const PredictorContext &ctx) {
  require_list(list);
  if (!ctx.collection_stats || !ctx.doc_text_source || !ctx.tokenizer)
    throw InputError("Clarity needs collection statistics and document texts");
  const auto &p = ctx.params;
  auto weights =
      weights_from_scores(list, p.clarity_top_docs, WeightMode::sum_normalized);
  auto rm = build_relevance_model(list, *ctx.doc_text_source, weights,
                                  p.clarity_top_docs, p.clarity_clip_terms,
                                  *ctx.tokenizer);
  double kl = 0.0;
  for (const auto &[term, prob] : rm.probs) {
    auto background = ctx.collection_stats->probability(term);
    if (!background)
      throw InputError("term '" + term +
                       "' missing from collection statistics: doc text not "
                       "drawn from the stats corpus");
    kl += prob * std::log(prob / *background);
  }
  // Nonnegative in exact arithmetic; drop rounding residue.
  return std::max(0.0, kl);
}

namespace {
constexpr std::array<std::pair<Predictor, std::string_view>, 6> kNames{{
    {Predictor::clarity, "clarity"},
    {Predictor::wig, "wig"},
    {Predictor::nqc, "nqc"},
    {Predictor::sigma_max, "sigma_max"},
    {Predictor::n_sigma_x, "n_sigma_x"},
    {Predictor::smv, "smv"},
}};
} // namespace

std::string_view predictor_name(Predictor p) {
  for (const auto &[id, name] : kNames)
    if (id == p)
      return name;
  return "unknown";
}

Predictor parse_predictor(std::string_view name) {
  for (const auto &[id, n] : kNames)
    if (n == name)
      return id;
  throw InputError("unknown predictor '" + std::string(name) + "'");
}

std::vector<Predictor> all_predictors() {
  std::vector<Predictor> out;
  for (const auto &[id, name] : kNames)
    out.push_back(id);
  return out;
}

bool needs_query_text(Predictor p) {
  return p == Predictor::wig || p == Predictor::n_sigma_x;
}

namespace {

struct QueryOutcome {
  std::vector<PredictionRecord> records;
  std::vector<PredictionFailure> failures;
};

QueryOutcome predict_one(const QueryId &id, const RankedList &original,
                         const Query *query,
                         const PredictionResources &resources,
                         std::span<const Predictor> selection) {
  QueryOutcome out;
  RankedList list = resources.score_shift != 0.0
                        ? original.shifted(resources.score_shift)
                        : original;
  PredictorContext ctx;
  ctx.collection_stats = resources.collection_stats;
  ctx.doc_text_source = resources.doc_text_source;
  ctx.tokenizer = &resources.tokenizer;
  ctx.params = resources.params;
  ctx.corpus_score = corpus_score(list, resources.params.corpus_score_depth);
  // Score-only predictors never look at the text; a placeholder keeps the
  // signatures uniform when the query set lacks this id.
  Query placeholder(id, "_", 1);
  const Query &q = query ? *query : placeholder;
  for (Predictor p : selection) {
    std::string name(predictor_name(p));
    if (!query && needs_query_text(p)) {
      out.failures.push_back({id, name, "no query text for " + id.raw});
      continue;
    }
    try {
      double value = 0.0;
      switch (p) {
      case Predictor::clarity:
        value = clarity(q, list, ctx);
        break;
      case Predictor::wig:
        value = wig(q, list, ctx);
        break;
      case Predictor::nqc:
        value = nqc(q, list, ctx);
        break;
      case Predictor::sigma_max:
        value = sigma_max(list);
        break;
      case Predictor::n_sigma_x:
        value = n_sigma_x(q, list, ctx.params.sigma_x_percent,
                          ctx.params.sigma_normalization);
        break;
      case Predictor::smv:
        value = smv(q, list, ctx);
        break;
      }
      out.records.emplace_back(id, name, value);
    } catch (const Error &e) {
      out.failures.push_back({id, name, e.what()});
    }
  }
  return out;
}

} // namespace

PredictionTable run_predictors(const QuerySet &queries, const RunSet &run,
                               const PredictionResources &resources,
                               std::span<const Predictor> selection) {
  resources.params.validate();
  if (std::find(selection.begin(), selection.end(), Predictor::clarity) !=
          selection.end() &&
      (!resources.collection_stats || !resources.doc_text_source))
    throw InputError(
        "Clarity selected but collection statistics or document texts are "
        "missing");
  if (!std::isfinite(resources.score_shift))
    throw InputError("score shift must be finite");

  PredictionTable table;
  std::vector<const RankedList *> work;
  for (const auto &[id, list] : run) {
    if (list.empty())
      table.skipped.push_back(id);
    else
      work.push_back(&list);
  }
  for (const auto &[id, q] : queries)
    if (!run.count(id))
      table.skipped.push_back(id);
  std::sort(table.skipped.begin(), table.skipped.end());

  std::vector<QueryOutcome> outcomes(work.size());
  auto process = [&](std::size_t i) {
    const RankedList &list = *work[i];
    auto q = queries.find(list.query_id());
    outcomes[i] = predict_one(list.query_id(), list,
                              q == queries.end() ? nullptr : &q->second,
                              resources, selection);
  };
  std::size_t threads =
      std::max<std::size_t>(1, std::min(resources.threads, work.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < work.size(); ++i)
      process(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < work.size(); i += threads)
          process(i);
      });
  }

  for (auto &o : outcomes) {
    std::move(o.records.begin(), o.records.end(),
              std::back_inserter(table.records));
    std::move(o.failures.begin(), o.failures.end(),
              std::back_inserter(table.failures));
  }
  std::sort(table.records.begin(), table.records.end(),
            [](const PredictionRecord &a, const PredictionRecord &b) {
              if (a.predictor != b.predictor)
                return a.predictor < b.predictor;
              return a.query_id < b.query_id;
            });
  return table;
}

void write_prediction_table(std::ostream &out, const PredictionTable &table) {
  for (const auto &r : table.records)
    out << r.query_id.raw << '\t' << r.predictor << '\t'
        << format_double(r.value) << '\n';
}

} // namespace qpp
