#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace sleuth {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

// Pairwise summation; deterministic for a fixed input order and more accurate
// than a running sum for long inputs.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t mid = n / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

}  // namespace detail

/// log(sum_i exp(x_i)); -inf entries contribute zero mass.
inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  std::vector<double> e(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    e[i] = (xs[i] == kNegInf) ? 0.0 : std::exp(xs[i] - m);
  return m + std::log(detail::pairwise_sum(e));
}

/// log((1/n) sum_i exp(x_i)). When every term equals x the result is exactly
/// x: the scaled sum is n/n == 1 and log(1) == 0.
inline double log_mean_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  std::vector<double> e(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    e[i] = (xs[i] == kNegInf) ? 0.0 : std::exp(xs[i] - m);
  return m + std::log(detail::pairwise_sum(e) / static_cast<double>(xs.size()));
}

}  // namespace sleuth
