#include "qpp/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "qpp/error.hpp"
#include "qpp/ingest.hpp"
#include "qpp/numeric.hpp"

namespace qpp {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw InputError("correlation inputs differ in length");
  if (x.size() < kMinSampleSize)
    throw DegenerateError("need at least " + std::to_string(kMinSampleSize) +
                          " pairs, got " + std::to_string(x.size()));
}

double t_test_p(double r, std::size_t n) {
  if (std::abs(r) >= 1.0)
    return 0.0;
  double df = static_cast<double>(n) - 2.0;
  double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult make_result(double coefficient, double p, std::size_t n) {
  CorrelationResult r;
  r.coefficient = std::clamp(coefficient, -1.0, 1.0);
  r.p_value = p;
  r.n = n;
  r.significant = p < kSignificanceLevel;
  return r;
}

double pearson_coefficient(std::span<const double> x, std::span<const double> y) {
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateError("degenerate sample: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

// Sizes of runs of equal values in an already sorted sequence.
template <class It, class Eq>
void tie_groups(It first, It last, Eq eq, std::vector<std::int64_t> &out) {
  while (first != last) {
    It run = first;
    std::int64_t len = 0;
    while (run != last && eq(*first, *run)) {
      ++run;
      ++len;
    }
    if (len > 1)
      out.push_back(len);
    first = run;
  }
}

std::int64_t pairs_of(std::int64_t t) { return t * (t - 1) / 2; }

// Inversions (strict) in v[lo, hi), merge-sorting v in place.
std::int64_t count_inversions(std::vector<double> &v, std::vector<double> &tmp,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2)
    return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, tmp, lo, mid) +
                     count_inversions(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      tmp[k++] = v[i++];
    } else {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[k++] = v[j++];
    }
  }
  while (i < mid)
    tmp[k++] = v[i++];
  while (j < hi)
    tmp[k++] = v[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return inv;
}

} // namespace

std::string_view coefficient_name(Coefficient c) {
  switch (c) {
  case Coefficient::pearson:
    return "pearson";
  case Coefficient::kendall:
    return "kendall";
  case Coefficient::spearman:
    return "spearman";
  }
  return "unknown";
}

Coefficient parse_coefficient(std::string_view name) {
  if (name == "pearson")
    return Coefficient::pearson;
  if (name == "kendall")
    return Coefficient::kendall;
  if (name == "spearman")
    return Coefficient::spearman;
  throw InputError("unknown coefficient '" + std::string(name) + "'");
}

KendallTest parse_kendall_test(std::string_view name) {
  if (name == "normal")
    return KendallTest::normal;
  if (name == "t")
    return KendallTest::t_test;
  throw InputError("unknown Kendall significance test '" + std::string(name) +
                   "'");
}

PairedSample pair(std::span<const PredictionRecord> predictions,
                  std::span<const ActualRecord> actuals) {
  std::map<QueryId, double> predicted, actual;
  for (const auto &p : predictions)
    if (!predicted.emplace(p.query_id, p.value).second)
      throw InputError("duplicate prediction for " + p.query_id.raw);
  for (const auto &a : actuals)
    if (!actual.emplace(a.query_id, a.value).second)
      throw InputError("duplicate actual for " + a.query_id.raw);
  PairedSample s;
  for (const auto &[id, value] : predicted) {
    auto it = actual.find(id);
    if (it == actual.end()) {
      ++s.dropped_predictions;
      continue;
    }
    s.query_ids.push_back(id);
    s.predicted.push_back(value);
    s.actual.push_back(it->second);
  }
  s.dropped_actuals = actual.size() - s.size();
  if (s.size() < kMinSampleSize)
    throw DegenerateError("only " + std::to_string(s.size()) +
                          " common query ids (need " +
                          std::to_string(kMinSampleSize) + ")");
  return s;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  double r = std::clamp(pearson_coefficient(x, y), -1.0, 1.0);
  return make_result(r, t_test_p(r, x.size()), x.size());
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]])
      ++j;
    // positions i..j (0-based) share rank ((i+1) + (j+1)) / 2
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

CorrelationResult kendall(std::span<const double> x, std::span<const double> y,
                          KendallTest test) {
  require_same_length(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b])
      return x[a] < x[b];
    return y[a] < y[b];
  });

  std::vector<std::int64_t> x_ties, y_ties, joint_ties;
  tie_groups(order.begin(), order.end(),
             [&](std::size_t a, std::size_t b) { return x[a] == x[b]; }, x_ties);
  tie_groups(order.begin(), order.end(),
             [&](std::size_t a, std::size_t b) {
               return x[a] == x[b] && y[a] == y[b];
             },
             joint_ties);

  std::vector<double> ys(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[order[i]];
  std::int64_t swaps = count_inversions(ys, tmp, 0, n);
  tie_groups(ys.begin(), ys.end(), std::equal_to<>(), y_ties);

  auto sum_pairs = [](const std::vector<std::int64_t> &ts) {
    std::int64_t s = 0;
    for (auto t : ts)
      s += pairs_of(t);
    return s;
  };
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t n0 = pairs_of(nn);
  const std::int64_t n1 = sum_pairs(x_ties);
  const std::int64_t n2 = sum_pairs(y_ties);
  const std::int64_t n3 = sum_pairs(joint_ties);
  if (n1 == n0 || n2 == n0)
    throw DegenerateError("degenerate sample: all pairs tied");
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;

  double tau = static_cast<double>(s) /
               std::sqrt(static_cast<double>(n0 - n1) *
                         static_cast<double>(n0 - n2));
  tau = std::clamp(tau, -1.0, 1.0);

  double p = 0.0;
  if (test == KendallTest::t_test) {
    p = t_test_p(tau, n);
  } else {
    auto moments = [](const std::vector<std::int64_t> &ts) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (auto ti : ts) {
        double t = static_cast<double>(ti);
        a += t * (t - 1.0) * (2.0 * t + 5.0);
        b += t * (t - 1.0) * (t - 2.0);
        c += t * (t - 1.0);
      }
      return std::array<double, 3>{a, b, c};
    };
    auto [ax, bx, cx] = moments(x_ties);
    auto [ay, by, cy] = moments(y_ties);
    double dn = static_cast<double>(n);
    double var = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - ax - ay) / 18.0 +
                 bx * by / (9.0 * dn * (dn - 1.0) * (dn - 2.0)) +
                 cx * cy / (2.0 * dn * (dn - 1.0));
    double z = std::max(std::abs(static_cast<double>(s)) - 1.0, 0.0) /
               std::sqrt(var);
    p = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  }
  return make_result(tau, p, n);
}

CorrelationResult pearson(const PairedSample &s) {
  return pearson(s.predicted, s.actual);
}
CorrelationResult spearman(const PairedSample &s) {
  return spearman(s.predicted, s.actual);
}
CorrelationResult kendall(const PairedSample &s, KendallTest test) {
  return kendall(s.predicted, s.actual, test);
}

CorrelationResult correlate(const PairedSample &s, Coefficient c,
                            KendallTest test) {
  switch (c) {
  case Coefficient::pearson:
    return pearson(s);
  case Coefficient::kendall:
    return kendall(s, test);
  case Coefficient::spearman:
    return spearman(s);
  }
  throw InputError("unknown coefficient");
}

std::size_t CorrelationReport::succeeded() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](auto &r) { return r.ok(); }));
}

CorrelationReport evaluate_predictors(std::span<const PredictionRecord> predictions,
                                      std::span<const ActualRecord> actuals,
                                      const std::string &metric,
                                      KendallTest test) {
  std::map<std::string, std::vector<PredictionRecord>> by_predictor;
  for (const auto &p : predictions)
    by_predictor[p.predictor].push_back(p);
  std::vector<ActualRecord> metric_actuals;
  for (const auto &a : actuals)
    if (a.metric == metric)
      metric_actuals.push_back(a);

  CorrelationReport report;
  for (const auto &[name, records] : by_predictor) {
    ReportRow row;
    row.predictor = name;
    row.metric = metric;
    try {
      PairedSample s = pair(records, metric_actuals);
      row.n = s.size();
      row.dropped_predictions = s.dropped_predictions;
      row.dropped_actuals = s.dropped_actuals;
      row.pearson = pearson(s);
      row.kendall = kendall(s, test);
      row.spearman = spearman(s);
    } catch (const Error &e) {
      row.pearson.reset();
      row.kendall.reset();
      row.spearman.reset();
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {
std::string cell(const std::optional<CorrelationResult> &r, bool p) {
  if (!r)
    return "NA";
  return format_double(p ? r->p_value : r->coefficient);
}

std::string sanitize(std::string s) {
  for (char &c : s)
    if (c == '\t' || c == '\n' || c == '\r')
      c = ' ';
  return s;
}

nlohmann::json result_json(const std::optional<CorrelationResult> &r) {
  if (!r)
    return nullptr;
  return {{"coefficient", r->coefficient},
          {"p_value", r->p_value},
          {"significant", r->significant}};
}
} // namespace

void write_report_tsv(std::ostream &out, const CorrelationReport &report) {
  out << "predictor\tmetric\tpearson\tpearson_p\tkendall\tkendall_p\tspearman\t"
         "spearman_p\tn\tstatus\n";
  for (const auto &row : report.rows)
    out << row.predictor << '\t' << row.metric << '\t' << cell(row.pearson, false)
        << '\t' << cell(row.pearson, true) << '\t' << cell(row.kendall, false)
        << '\t' << cell(row.kendall, true) << '\t' << cell(row.spearman, false)
        << '\t' << cell(row.spearman, true) << '\t' << row.n << '\t'
        << (row.ok() ? std::string("ok") : sanitize(row.error)) << '\n';
}

nlohmann::json report_json(const CorrelationReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &row : report.rows) {
    nlohmann::json j{{"predictor", row.predictor},
                     {"metric", row.metric},
                     {"n", row.n},
                     {"dropped_predictions", row.dropped_predictions},
                     {"dropped_actuals", row.dropped_actuals},
                     {"pearson", result_json(row.pearson)},
                     {"kendall", result_json(row.kendall)},
                     {"spearman", result_json(row.spearman)}};
    j["error"] = row.ok() ? nlohmann::json(nullptr) : nlohmann::json(row.error);
    rows.push_back(std::move(j));
  }
  return {{"rows", std::move(rows)}};
}

std::map<int, TurnCorrelation>
per_turn_correlation(std::span<const PredictionRecord> predictions,
                     std::span<const ActualRecord> actuals, Coefficient kind,
                     KendallTest test) {
  std::map<QueryId, double> actual;
  for (const auto &a : actuals)
    if (!actual.emplace(a.query_id, a.value).second)
      throw InputError("duplicate actual for " + a.query_id.raw);
  std::map<int, PairedSample> groups;
  bool any_turn = false;
  std::set<QueryId> seen;
  for (const auto &p : predictions) {
    if (!seen.insert(p.query_id).second)
      throw InputError("duplicate prediction for " + p.query_id.raw);
    auto it = actual.find(p.query_id);
    if (it == actual.end() || !p.query_id.turn)
      continue;
    any_turn = true;
    auto &g = groups[*p.query_id.turn];
    g.query_ids.push_back(p.query_id);
    g.predicted.push_back(p.value);
    g.actual.push_back(it->second);
  }
  if (!any_turn)
    throw InputError("no judged query id carries a turn number");

  std::map<int, TurnCorrelation> out;
  for (const auto &[turn, sample] : groups) {
    TurnCorrelation tc;
    tc.turn = turn;
    tc.n = sample.size();
    if (tc.n < kMinSampleSize) {
      tc.status = "insufficient";
    } else {
      try {
        tc.result = correlate(sample, kind, test);
        tc.status = "ok";
      } catch (const DegenerateError &) {
        tc.status = "degenerate";
      }
    }
    out.emplace(turn, std::move(tc));
  }
  return out;
}

void write_per_turn(std::ostream &out,
                    const std::map<int, TurnCorrelation> &turns) {
  out << "turn\tn\tcoefficient\tp\tstatus\n";
  for (const auto &[turn, tc] : turns)
    out << turn << '\t' << tc.n << '\t' << cell(tc.result, false) << '\t'
        << cell(tc.result, true) << '\t' << tc.status << '\n';
}

std::vector<double> min_max_normalize(std::span<const double> xs) {
  if (xs.empty())
    throw DegenerateError("no scores to normalize");
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  double min = *lo, max = *hi;
  if (min == max)
    throw DegenerateError("min = max, normalization undefined");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs)
    out.push_back((x - min) / (max - min));
  return out;
}

ScoreDistribution score_distribution(const std::string &name,
                                     const RunSet &run, std::size_t bins) {
  if (bins == 0)
    throw InputError("bins must be at least 1");
  std::vector<double> pooled;
  for (const auto &[id, list] : run)
    for (const auto &doc : list.docs())
      pooled.push_back(doc.score);
  if (pooled.empty())
    throw DegenerateError("run " + name + " has no scores");
  ScoreDistribution d;
  d.run = name;
  d.count = pooled.size();
  auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
  d.min = *lo;
  d.max = *hi;
  auto normalized = min_max_normalize(pooled);
  d.mean = mean(normalized);
  d.std = population_std(normalized);
  d.histogram.assign(bins, 0);
  for (double v : normalized) {
    auto b = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++d.histogram[std::min(b, bins - 1)];
  }
  return d;
}

void write_histogram(std::ostream &out, const ScoreDistribution &dist) {
  out << "bin_low\tbin_high\tcount\n";
  const double bins = static_cast<double>(dist.histogram.size());
  for (std::size_t i = 0; i < dist.histogram.size(); ++i)
    out << format_double(static_cast<double>(i) / bins) << '\t'
        << format_double(static_cast<double>(i + 1) / bins) << '\t'
        << dist.histogram[i] << '\n';
  out << "#summary\tn=" << dist.count << "\tmin=" << format_double(dist.min)
      << "\tmax=" << format_double(dist.max)
      << "\tmean=" << format_double(dist.mean)
      << "\tstd=" << format_double(dist.std) << '\n';
}

void write_distribution_summary(std::ostream &out,
                                std::span<const ScoreDistribution> dists) {
  out << "run\tn\tmin\tmax\tmean\tstd\tstatus\n";
  for (const auto &d : dists) {
    if (!d.error.empty()) {
      out << d.run << "\t0\tNA\tNA\tNA\tNA\t" << sanitize(d.error) << '\n';
      continue;
    }
    out << d.run << '\t' << d.count << '\t' << format_double(d.min) << '\t'
        << format_double(d.max) << '\t' << format_double(d.mean) << '\t'
        << format_double(d.std) << "\tok\n";
  }
}

} // namespace qpp
