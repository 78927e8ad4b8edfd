#pragma once

#include <cmath>
#include <stdexcept>

#include "sleuth/logspace.hpp"
#include "sleuth/rng.hpp"

namespace sleuth {

/// Weibull transmission-time family with scale alpha and shape k.
///
///   f(tau)  = (k tau^{k-1} / alpha^k) exp(-(tau/alpha)^k)   tau >= 0
///   S(tau)  = exp(-(tau/alpha)^k)
///   H(tau)  = f(tau) / S(tau) = k tau^{k-1} / alpha^k
///
/// k = 1 is the exponential distribution (constant hazard 1/alpha), k = 2 the
/// Rayleigh distribution. Log-space forms are the primitives; the linear-space
/// functions wrap them so that products over many nodes never underflow.
namespace kernels {

inline void check_params(double alpha, double shape) {
  if (!(alpha > 0.0)) throw std::invalid_argument("kernel scale alpha must be > 0");
  if (!(shape > 0.0)) throw std::invalid_argument("kernel shape k must be > 0");
}

/// log f(tau); -inf for tau < 0.
inline double log_density(double tau, double alpha, double shape) {
  check_params(alpha, shape);
  if (tau < 0.0) return kNegInf;
  if (shape == 1.0) return -std::log(alpha) - tau / alpha;
  if (tau == 0.0) return shape > 1.0 ? kNegInf : kInf;
  const double z = tau / alpha;
  return std::log(shape / alpha) + (shape - 1.0) * std::log(z) - std::pow(z, shape);
}

/// log S(tau); 0 for tau <= 0 (delays are nonnegative).
inline double log_survival(double tau, double alpha, double shape) {
  check_params(alpha, shape);
  if (tau <= 0.0) return 0.0;
  if (shape == 1.0) return -tau / alpha;
  return -std::pow(tau / alpha, shape);
}

inline double density(double tau, double alpha, double shape) {
  const double ld = log_density(tau, alpha, shape);
  return ld == kInf ? kInf : std::exp(ld);
}

inline double survival(double tau, double alpha, double shape) {
  return std::exp(log_survival(tau, alpha, shape));
}

/// Instantaneous infection rate f/S. Requires tau >= 0; for k = 1 it is the
/// constant 1/alpha.
inline double hazard(double tau, double alpha, double shape) {
  check_params(alpha, shape);
  if (tau < 0.0) throw std::invalid_argument("hazard requires tau >= 0");
  if (shape == 1.0) return 1.0 / alpha;
  if (tau == 0.0) return shape > 1.0 ? 0.0 : kInf;
  return shape * std::pow(tau / alpha, shape - 1.0) / alpha;
}

inline double cdf(double tau, double alpha, double shape) {
  if (tau <= 0.0) return 0.0;
  return -std::expm1(log_survival(tau, alpha, shape));
}

/// Inverse-CDF draw: tau = alpha * (-ln u)^{1/k}, u uniform in (0, 1).
inline double sample(double alpha, double shape, Rng& rng) {
  check_params(alpha, shape);
  const double e = -std::log(rng.next_unit());
  return shape == 1.0 ? alpha * e : alpha * std::pow(e, 1.0 / shape);
}

}  // namespace kernels
}  // namespace sleuth
