#pragma once

// Test-only oracle: evaluates the incomplete-cascade likelihood by direct
// numerical integration over the hidden infection times (at most two hidden
// reachable non-source nodes). Written against the model definition only;
// it shares no code with the estimator it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/simulate.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Conditional density of one node given its parents' times, spelled out from
// the survival/hazard form for the exponential kernel.
inline double node_density(const sleuth::Network& net, int node,
                           const std::vector<double>& times) {
  const double t_child = times[node];
  double surv = 1.0;
  double hazard = 0.0;
  for (const auto& arc : net.in_arcs(node)) {
    const double gap = t_child - times[arc.src];
    if (!(gap > 0.0) || std::isinf(times[arc.src])) continue;
    surv *= std::exp(-gap / arc.alpha);
    hazard += 1.0 / arc.alpha;
  }
  return hazard > 0.0 ? surv * hazard : 0.0;
}

inline double joint_density(const sleuth::Network& net, int source,
                            const std::vector<double>& times) {
  double product = 1.0;
  for (int v = 0; v < net.node_count(); ++v) {
    if (v == source || std::isinf(times[v])) continue;
    product *= node_density(net, v, times);
    if (product == 0.0) return 0.0;
  }
  return product;
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> splits, double tol) {
  splits.push_back(a);
  splits.push_back(b);
  std::sort(splits.begin(), splits.end());
  double total = 0.0;
  for (std::size_t i = 1; i < splits.size(); ++i) {
    const double lo = std::max(a, splits[i - 1]);
    const double hi = std::min(b, splits[i]);
    if (hi - lo < 1e-14) continue;
    const double m = 0.5 * (lo + hi);
    total += adaptive_simpson(f, lo, hi, f(lo), f(m), f(hi), tol, 40);
  }
  return total;
}

/// Marginal likelihood of the observed times given the source and its start
/// time, by nested quadrature over the hidden reachable nodes.
inline double marginal_likelihood(const sleuth::Network& net,
                                  const sleuth::ObservedCascade& obs, int source,
                                  double t_s, double tol = 1e-12) {
  std::vector<double> times(net.node_count(), kInf);
  for (const auto& [node, time] : obs.observed) times[node] = time;
  times[source] = t_s;

  std::vector<int> free_nodes;
  for (int v : sleuth::reachable_set(net, source))
    if (v != source && !obs.is_observed(v)) free_nodes.push_back(v);
  if (free_nodes.size() > 2)
    throw std::logic_error("oracle supports at most two hidden reachable nodes");

  double cap = t_s;
  for (const auto& [node, time] : obs.observed) cap = std::max(cap, time);
  double max_alpha = 0.0;
  for (const auto& e : net.edges()) max_alpha = std::max(max_alpha, e.alpha);
  cap += 80.0 * max_alpha;

  std::vector<double> fixed_splits{t_s};
  for (const auto& [node, time] : obs.observed) fixed_splits.push_back(time);

  if (free_nodes.empty()) return joint_density(net, source, times);

  if (free_nodes.size() == 1) {
    const int h = free_nodes[0];
    auto f = [&](double t) {
      times[h] = t;
      return joint_density(net, source, times);
    };
    const double value = integrate(f, t_s, cap, fixed_splits, tol);
    times[h] = kInf;
    return value;
  }

  const int h1 = free_nodes[0], h2 = free_nodes[1];
  auto outer = [&](double t1) {
    times[h1] = t1;
    auto inner = [&](double t2) {
      times[h2] = t2;
      return joint_density(net, source, times);
    };
    std::vector<double> splits = fixed_splits;
    splits.push_back(t1);
    const double v = integrate(inner, t_s, cap, splits, tol);
    times[h2] = kInf;
    return v;
  };
  const double value = integrate(outer, t_s, cap, fixed_splits, tol * 10.0);
  return value;
}

}  // namespace oracle
