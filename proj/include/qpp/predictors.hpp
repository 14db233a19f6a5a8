#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/data_model.hpp"
#include "qpp/ingest.hpp"
#include "qpp/lm_stats.hpp"
#include "qpp/tokenizer.hpp"

namespace qpp {

enum class SigmaNormalization { query_length, sqrt_query_length };

// Defaults: k=5 for WIG, k=100 for NQC and SMV, x=50 for n(sigma_x%),
// relevance model from the top 100 documents clipped at 100 terms, corpus
// score over the top 1000 documents.
struct PredictorParams {
  std::size_t wig_k = 5;
  std::size_t nqc_k = 100;
  std::size_t smv_k = 100;
  double sigma_x_percent = 50.0;
  std::size_t clarity_top_docs = 100;
  std::size_t clarity_clip_terms = 100;
  std::size_t corpus_score_depth = 1000;
  // Divide by the raw corpus score instead of its magnitude.
  bool strict_corpus_sign = false;
  SigmaNormalization sigma_normalization = SigmaNormalization::query_length;

  void validate() const;
};

struct PredictorContext {
  double corpus_score = 0.0;
  const CollectionStats *collection_stats = nullptr;
  const DocTextSource *doc_text_source = nullptr;
  const Tokenizer *tokenizer = nullptr;
  PredictorParams params;
};

// Mean of the first min(depth, n) scores; stands in for Score(q;D).
double corpus_score(const RankedList &list, std::size_t depth);

double wig(const Query &query, const RankedList &list,
           const PredictorContext &ctx);
double nqc(const Query &query, const RankedList &list,
           const PredictorContext &ctx);
double sigma_max(const RankedList &list);
double n_sigma_x(const Query &query, const RankedList &list, double x_percent,
                 SigmaNormalization norm = SigmaNormalization::query_length);
double smv(const Query &query, const RankedList &list,
           const PredictorContext &ctx);
double clarity(const Query &query, const RankedList &list,
               const PredictorContext &ctx);

enum class Predictor { clarity, wig, nqc, sigma_max, n_sigma_x, smv };

std::string_view predictor_name(Predictor p);
Predictor parse_predictor(std::string_view name);
std::vector<Predictor> all_predictors();
bool needs_query_text(Predictor p);

struct PredictionFailure {
  QueryId query_id;
  std::string predictor;
  std::string message;
};

struct PredictionTable {
  std::vector<PredictionRecord> records; // sorted by (predictor, qid)
  std::vector<PredictionFailure> failures;
  std::vector<QueryId> skipped; // queries without a (non-empty) list
};

struct PredictionResources {
  const CollectionStats *collection_stats = nullptr;
  const DocTextSource *doc_text_source = nullptr;
  Tokenizer tokenizer;
  PredictorParams params;
  double score_shift = 0.0; // added to every score before prediction
  std::size_t threads = 1;
};

// Throws InputError before any computation when a selected predictor's
// requirements are missing. Per-query failures are collected, not thrown.
PredictionTable run_predictors(const QuerySet &queries, const RunSet &run,
                               const PredictionResources &resources,
                               std::span<const Predictor> selection);

// `qid<TAB>predictor<TAB>value`.
void write_prediction_table(std::ostream &out, const PredictionTable &table);

} // namespace qpp
