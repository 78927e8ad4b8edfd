#include "sleuth/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sleuth/kernels.hpp"
#include "sleuth/logspace.hpp"

namespace sleuth {

double node_log_factor(const NodeFactor& factor) {
  double log_surv = 0.0;
  double hazard_sum = 0.0;
  for (const auto& parent : factor.parents) {
    const double gap = factor.child_time - parent.time;
    if (gap <= 0.0 || std::isinf(parent.time)) continue;
    log_surv += kernels::log_survival(gap, parent.alpha, factor.kernel_shape);
    hazard_sum += kernels::hazard(gap, parent.alpha, factor.kernel_shape);
  }
  if (hazard_sum <= 0.0) return kNegInf;
  return log_surv + std::log(hazard_sum);
}

double complete_log_likelihood(const Network& net, const Cascade& cascade,
                               Censoring censoring) {
  if (static_cast<int>(cascade.times.size()) != net.node_count())
    throw std::invalid_argument("complete_log_likelihood: times size mismatch");
  if (cascade.source < 0 || cascade.source >= net.node_count())
    throw std::invalid_argument("complete_log_likelihood: invalid source");

  const double t_s = cascade.times[cascade.source];
  const double cutoff = t_s + cascade.window;
  const double shape = net.kernel_shape();

  double total = 0.0;
  for (int i = 0; i < net.node_count(); ++i) {
    if (i == cascade.source) continue;
    const double t_i = cascade.times[i];
    if (std::isfinite(t_i)) {
      double log_surv = 0.0, hazard_sum = 0.0;
      for (const auto& arc : net.in_arcs(i)) {
        const double gap = t_i - cascade.times[arc.src];
        if (!(gap > 0.0)) continue;
        log_surv += kernels::log_survival(gap, arc.alpha, shape);
        hazard_sum += kernels::hazard(gap, arc.alpha, shape);
      }
      if (hazard_sum <= 0.0) return kNegInf;
      total += log_surv + std::log(hazard_sum);
    } else if (censoring == Censoring::on && std::isfinite(cutoff)) {
      for (const auto& arc : net.in_arcs(i)) {
        const double gap = cutoff - cascade.times[arc.src];
        if (gap > 0.0)
          total += kernels::log_survival(gap, arc.alpha, shape);
      }
    }
  }
  return total;
}

std::vector<int> m_set(const Network& net, const ObservedCascade& obs) {
  std::vector<int> out;
  for (int v = 0; v < net.node_count(); ++v) {
    if (obs.is_observed(v)) continue;
    for (const auto& arc : net.in_arcs(v)) {
      if (obs.is_observed(arc.src)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

double LikelihoodEstimate::effective_sample_size() const {
  // (sum w)^2 / sum w^2 over the importance weights, computed in log space.
  std::vector<double> twice(sample_log_terms.size());
  for (std::size_t i = 0; i < sample_log_terms.size(); ++i)
    twice[i] = sample_log_terms[i] == kNegInf ? kNegInf : 2.0 * sample_log_terms[i];
  const double l1 = log_sum_exp(sample_log_terms);
  const double l2 = log_sum_exp(twice);
  if (l1 == kNegInf) return 0.0;
  return std::exp(2.0 * l1 - l2);
}

PhiEvaluator::PhiEvaluator(const Network& net, const ObservedCascade& obs,
                           int source, const SampleBank& bank)
    : source_(source),
      sample_count_(bank.sample_count()),
      node_count_(net.node_count()),
      shape_(net.kernel_shape()) {
  if (obs.observed.empty())
    throw std::invalid_argument("PhiEvaluator: no observed infections");
  if (source < 0 || source >= net.node_count() || obs.is_observed(source))
    throw std::invalid_argument("PhiEvaluator: candidate source must be a hidden node");
  t_hi_ = obs.min_observed_time();

  auto make_child = [&](int node, bool observed_child, double obs_time) {
    ChildSpec child;
    child.node = node;
    child.observed_child = observed_child;
    child.obs_time = obs_time;
    for (const auto& arc : net.in_arcs(node)) {
      const bool parent_observed = obs.is_observed(arc.src);
      child.parents.push_back({arc.src, arc.alpha, parent_observed,
                               parent_observed ? obs.observed_time(arc.src) : 0.0});
    }
    return child;
  };

  for (const auto& [node, time] : obs.observed)
    children_.push_back(make_child(node, true, time));
  for (int m : m_set(net, obs)) {
    if (m == source_) continue;  // its time is the decision variable
    children_.push_back(make_child(m, false, 0.0));
  }

  base_ = bank.base_times(source);

  // Fold the t_s-invariant M denominators into a per-sample constant: all of
  // their time gaps are differences of sampled arrivals, so a source-time
  // shift cancels.
  offset_.assign(sample_count_, 0.0);
  for (int l = 0; l < sample_count_; ++l) {
    double acc = 0.0;
    for (const auto& child : children_) {
      if (child.observed_child) continue;
      const double child_time = base_time(l, child.node);
      if (std::isinf(child_time)) {
        acc = kNegInf;  // sampled world never infects this node
        break;
      }
      double log_surv = 0.0, hazard_sum = 0.0;
      for (const auto& parent : child.parents) {
        const double gap = child_time - base_time(l, parent.node);
        if (!(gap > 0.0)) continue;
        log_surv += kernels::log_survival(gap, parent.alpha, shape_);
        hazard_sum += kernels::hazard(gap, parent.alpha, shape_);
      }
      if (hazard_sum <= 0.0) {
        acc = kNegInf;
        break;
      }
      acc -= log_surv + std::log(hazard_sum);
    }
    offset_[l] = acc;
  }
}

double PhiEvaluator::default_lower_bound(double kappa) const {
  double reach = 0.0;
  for (int l = 0; l < sample_count_; ++l) {
    for (const auto& child : children_) {
      if (!child.observed_child) continue;
      const double b = base_time(l, child.node);
      if (std::isfinite(b)) reach = std::max(reach, b);
    }
  }
  return t_hi_ - std::max(kappa * reach, 1.0);
}

double PhiEvaluator::sample_log_term(int sample, double t_s) const {
  double term = offset_[sample];
  if (term == kNegInf) return kNegInf;
  for (const auto& child : children_) {
    double child_time;
    if (child.observed_child) {
      child_time = child.obs_time;
    } else {
      child_time = base_time(sample, child.node) + t_s;
    }
    double log_surv = 0.0, hazard_sum = 0.0;
    for (const auto& parent : child.parents) {
      const double parent_time =
          parent.observed ? parent.obs_time : base_time(sample, parent.node) + t_s;
      const double gap = child_time - parent_time;
      if (!(gap > 0.0)) continue;
      log_surv += kernels::log_survival(gap, parent.alpha, shape_);
      hazard_sum += kernels::hazard(gap, parent.alpha, shape_);
    }
    if (hazard_sum <= 0.0) return kNegInf;
    term += log_surv + std::log(hazard_sum);
  }
  return term;
}

double PhiEvaluator::log_phi(double t_s) const {
  std::vector<double> terms(sample_count_);
  for (int l = 0; l < sample_count_; ++l) terms[l] = sample_log_term(l, t_s);
  return log_mean_exp(terms);
}

LikelihoodEstimate PhiEvaluator::estimate(double t_s) const {
  LikelihoodEstimate est;
  est.sample_count = sample_count_;
  est.sample_log_terms.resize(sample_count_);
  for (int l = 0; l < sample_count_; ++l)
    est.sample_log_terms[l] = sample_log_term(l, t_s);
  est.dropped_samples = static_cast<int>(
      std::count(est.sample_log_terms.begin(), est.sample_log_terms.end(), kNegInf));
  est.log_value = log_mean_exp(est.sample_log_terms);
  return est;
}

std::vector<ExpTerm> PhiEvaluator::exp_terms(double t_s) const {
  if (shape_ != 1.0)
    throw std::invalid_argument("exp_terms requires an exponential kernel (k = 1)");
  std::vector<ExpTerm> terms(sample_count_);
  for (int l = 0; l < sample_count_; ++l) {
    double log_w = offset_[l];
    double rate = 0.0;
    for (const auto& child : children_) {
      if (log_w == kNegInf) break;
      const double child_base = child.observed_child ? child.obs_time
                                                     : base_time(l, child.node);
      double const_part = 0.0, slope = 0.0, hazard_sum = 0.0;
      for (const auto& parent : child.parents) {
        const double inv_alpha = 1.0 / parent.alpha;
        if (child.observed_child && !parent.observed) {
          // gap = t_i - (base_j + t_s)
          const double gap0 = child_base - base_time(l, parent.node);
          if (!(gap0 - t_s > 0.0)) continue;
          const_part -= gap0 * inv_alpha;
          slope += inv_alpha;
        } else if (!child.observed_child && parent.observed) {
          // gap = (base_i + t_s) - t_j
          const double gap0 = child_base - parent.obs_time;
          if (!(gap0 + t_s > 0.0)) continue;
          const_part -= gap0 * inv_alpha;
          slope -= inv_alpha;
        } else {
          // both fixed or both sampled: the gap does not involve t_s
          const double p0 = parent.observed ? parent.obs_time : base_time(l, parent.node);
          const double gap = child_base - p0;
          if (!(gap > 0.0)) continue;
          const_part -= gap * inv_alpha;
        }
        hazard_sum += inv_alpha;
      }
      if (hazard_sum <= 0.0) {
        log_w = kNegInf;
        break;
      }
      log_w += const_part + std::log(hazard_sum);
      rate += slope;
    }
    terms[l] = {log_w, log_w == kNegInf ? 0.0 : rate};
  }
  return terms;
}

LikelihoodEstimate phi_L(const Network& net, const ObservedCascade& obs,
                         int source, double t_s, const SampleBank& bank) {
  return PhiEvaluator(net, obs, source, bank).estimate(t_s);
}

std::vector<ExpTerm> export_exp_coefficients(const PhiEvaluator& evaluator,
                                             double t_s) {
  return evaluator.exp_terms(t_s);
}

}  // namespace sleuth
