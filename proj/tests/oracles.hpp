#pragma once

// Test-only reference computations. Deliberately naive and independent of
// the library code paths they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qpp::oracle {

struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;
  std::int64_t tied_y = 0;
};

inline PairCounts count_pairs(const std::vector<double> &x,
                              const std::vector<double> &y) {
  PairCounts c;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0)
        ++c.tied_x;
      if (dy == 0)
        ++c.tied_y;
      if ((dx > 0 && dy > 0) || (dx < 0 && dy < 0))
        ++c.concordant;
      else if ((dx > 0 && dy < 0) || (dx < 0 && dy > 0))
        ++c.discordant;
    }
  return c;
}

inline double tau_b(const std::vector<double> &x, const std::vector<double> &y) {
  auto c = count_pairs(x, y);
  auto n = static_cast<std::int64_t>(x.size());
  std::int64_t n0 = n * (n - 1) / 2;
  return static_cast<double>(c.concordant - c.discordant) /
         std::sqrt(static_cast<double>(n0 - c.tied_x) *
                   static_cast<double>(n0 - c.tied_y));
}

// Population std of xs[0..j) computed from a fresh copy.
inline double prefix_std(const std::vector<double> &xs, std::size_t j) {
  std::vector<double> prefix(xs.begin(), xs.begin() + static_cast<long>(j));
  double sum = 0.0;
  for (double v : prefix)
    sum += v;
  double mu = sum / static_cast<double>(j);
  double ss = 0.0;
  for (double v : prefix)
    ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(j));
}

inline double max_prefix_std(const std::vector<double> &sorted_desc) {
  double best = 0.0;
  for (std::size_t j = 1; j <= sorted_desc.size(); ++j) {
    double s = prefix_std(sorted_desc, j);
    if (s > best)
      best = s;
  }
  return best;
}

// Random vector; with ties drawn from a small integer alphabet.
inline std::vector<double> random_vector(std::mt19937_64 &rng, std::size_t n,
                                         bool ties) {
  std::vector<double> v(n);
  if (ties) {
    std::uniform_int_distribution<int> d(0, 5);
    for (auto &x : v)
      x = d(rng);
  } else {
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    for (auto &x : v)
      x = d(rng);
  }
  return v;
}

} // namespace qpp::oracle
