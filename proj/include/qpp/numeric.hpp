#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qpp {

// Accumulates offsets from the first element, so a constant sequence has
// exactly its own value as mean (and zero spread below).
inline double mean(std::span<const double> xs) {
  if (xs.empty())
    return 0.0;
  const double origin = xs.front();
  double sum = 0.0;
  for (double x : xs)
    sum += x - origin;
  return origin + sum / static_cast<double>(xs.size());
}

// Two-pass population standard deviation (divide by n).
inline double population_std(std::span<const double> xs) {
  if (xs.empty())
    return 0.0;
  double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs)
    ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

} // namespace qpp
