#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qpp/data_model.hpp"

namespace qpp {

// Predictions and actuals joined on query id, ordered by query id.
struct PairedSample {
  std::vector<QueryId> query_ids;
  std::vector<double> predicted;
  std::vector<double> actual;
  std::size_t dropped_predictions = 0;
  std::size_t dropped_actuals = 0;

  std::size_t size() const noexcept { return query_ids.size(); }
};

inline constexpr std::size_t kMinSampleSize = 3;
inline constexpr double kSignificanceLevel = 0.05;

// Throws DegenerateError when fewer than kMinSampleSize ids are shared and
// InputError when either side repeats a query id.
PairedSample pair(std::span<const PredictionRecord> predictions,
                  std::span<const ActualRecord> actuals);

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool significant = false;
};

enum class Coefficient { pearson, kendall, spearman };
enum class KendallTest { normal, t_test };

std::string_view coefficient_name(Coefficient c);
Coefficient parse_coefficient(std::string_view name);
KendallTest parse_kendall_test(std::string_view name);

// Two-sided Student t test on r with n - 2 degrees of freedom.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);
// Pearson on average ranks, same t test.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);
// Tau-b. Default p-value: normal approximation with tie-corrected variance
// and continuity correction.
CorrelationResult kendall(std::span<const double> x, std::span<const double> y,
                          KendallTest test = KendallTest::normal);

CorrelationResult pearson(const PairedSample &s);
CorrelationResult spearman(const PairedSample &s);
CorrelationResult kendall(const PairedSample &s,
                          KendallTest test = KendallTest::normal);
CorrelationResult correlate(const PairedSample &s, Coefficient c,
                            KendallTest test = KendallTest::normal);

// 1-based ranks, ties get the mean of their block.
std::vector<double> average_ranks(std::span<const double> xs);

struct ReportRow {
  std::string predictor;
  std::string metric;
  std::size_t n = 0;
  std::size_t dropped_predictions = 0;
  std::size_t dropped_actuals = 0;
  std::optional<CorrelationResult> pearson;
  std::optional<CorrelationResult> kendall;
  std::optional<CorrelationResult> spearman;
  std::string error; // empty when the row succeeded

  bool ok() const noexcept { return error.empty(); }
};

struct CorrelationReport {
  std::vector<ReportRow> rows; // sorted by (predictor, metric)

  std::size_t succeeded() const;
};

// One row per predictor found in `predictions`, against the actuals whose
// metric equals `metric`. Degenerate rows carry an error instead of numbers.
CorrelationReport evaluate_predictors(std::span<const PredictionRecord> predictions,
                                      std::span<const ActualRecord> actuals,
                                      const std::string &metric,
                                      KendallTest test = KendallTest::normal);

void write_report_tsv(std::ostream &out, const CorrelationReport &report);
nlohmann::json report_json(const CorrelationReport &report);

struct TurnCorrelation {
  int turn = 0;
  std::size_t n = 0;
  std::optional<CorrelationResult> result;
  std::string status; // "ok", "insufficient" or "degenerate"
};

// Predictions of one predictor against actuals of one metric, grouped by
// the turn parsed from the query ids. Throws InputError if no joined query
// carries a turn.
std::map<int, TurnCorrelation>
per_turn_correlation(std::span<const PredictionRecord> predictions,
                     std::span<const ActualRecord> actuals, Coefficient kind,
                     KendallTest test = KendallTest::normal);

void write_per_turn(std::ostream &out,
                    const std::map<int, TurnCorrelation> &turns);

struct ScoreDistribution {
  std::string run;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0; // of min-max normalized scores
  double std = 0.0;  // population, of normalized scores
  std::vector<std::size_t> histogram;
  std::string error;
};

// Pools every score in the run, min-max normalizes to [0,1] and bins
// uniformly. Throws DegenerateError for an empty or constant-score run.
ScoreDistribution score_distribution(const std::string &name,
                                     const RunSet &run, std::size_t bins = 50);
std::vector<double> min_max_normalize(std::span<const double> xs);

void write_histogram(std::ostream &out, const ScoreDistribution &dist);
void write_distribution_summary(std::ostream &out,
                                std::span<const ScoreDistribution> dists);

} // namespace qpp
