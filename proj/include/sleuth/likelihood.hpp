#pragma once

#include <span>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/simulate.hpp"

namespace sleuth {

/// Conditional factor of one infected node given its in-neighbors' times:
///   p(t_i | {t_j}) = prod_j S(t_i - t_j; a_ji) * sum_j H(t_i - t_j; a_ji)
/// where only parents infected strictly before t_i contribute.
struct NodeFactor {
  struct Parent {
    double time;
    double alpha;
  };
  double child_time = 0.0;
  double kernel_shape = 1.0;
  std::vector<Parent> parents;
};

/// Log of the factor above; -inf when no parent is feasible (the child's
/// infection cannot be explained, so the enclosing configuration has zero
/// probability).
double node_log_factor(const NodeFactor& factor);

enum class Censoring { on, off };

/// Log-likelihood of a fully observed cascade: sum of node_log_factor over
/// infected non-source nodes. With censoring on, nodes still uninfected at
/// the window cut-off contribute the survival of all their infected parents
/// up to the cut-off. -inf for time-infeasible cascades.
double complete_log_likelihood(const Network& net, const Cascade& cascade,
                               Censoring censoring = Censoring::on);

/// Hidden nodes with at least one observed in-neighbor. Only these hidden
/// factors survive the numerator/denominator cancellation in the sampled
/// likelihood; the rest are common to both and drop out. Sorted ascending.
std::vector<int> m_set(const Network& net, const ObservedCascade& obs);

/// Monte Carlo estimate of the incomplete-cascade log-likelihood.
struct LikelihoodEstimate {
  double log_value = kNegInf;  // log-mean-exp of the per-sample terms
  int sample_count = 0;
  int dropped_samples = 0;  // samples inconsistent with the observations
  std::vector<double> sample_log_terms;

  double effective_sample_size() const;
};

/// One additive term of the source-time profile for exponential kernels:
/// weight * exp(rate * t_s), weight > 0 held in log space.
struct ExpTerm {
  double log_weight;
  double rate;
};

/// Likelihood-profile evaluator for one (observation, candidate source) pair.
///
/// Holds the sampled arrival tables and the factor structure so that the
/// profile can be evaluated at many source times cheaply. Per sample l the
/// term is
///
///   prod_{i in O} p(t_i | sampled hidden parents, observed parents)
///   * prod_{i in M} p(t^l_i | sampled hidden parents, observed parents at
///                    their actual times)
///                 / p(t^l_i | all parents at their sampled times)
///
/// with sampled times t^l_i = base_times[i] + t_s. The denominator does not
/// depend on t_s (a shift moves child and parents together) and is folded
/// into a per-sample constant at construction. The candidate source itself
/// is excluded from the M product: its time is the free variable t_s, not a
/// sampled latent.
class PhiEvaluator {
 public:
  PhiEvaluator(const Network& net, const ObservedCascade& obs, int source,
               const SampleBank& bank);

  double log_phi(double t_s) const;
  LikelihoodEstimate estimate(double t_s) const;

  /// Per-sample (log weight, rate) pairs at the feasibility configuration in
  /// force at t_s; valid for exponential kernels only (k = 1). Within one
  /// piece of the profile, sum_l weight_l * exp(rate_l * t_s) equals
  /// L * phi(t_s).
  std::vector<ExpTerm> exp_terms(double t_s) const;

  int source() const { return source_; }
  int sample_count() const { return sample_count_; }
  double kernel_shape() const { return shape_; }

  /// Upper end of the searchable source-time domain: min observed time.
  double upper_bound() const { return t_hi_; }

  /// Heuristic lower end: min observed time minus kappa times the largest
  /// sampled arrival among observed nodes. Below it every observed-infection
  /// survival factor only keeps decaying.
  double default_lower_bound(double kappa = 3.0) const;

  // --- structure introspection (piecewise search machinery) ---

  struct ParentArc {
    int node;
    double alpha;
    bool observed;    // parent time is the actual observed time
    double obs_time;  // valid when observed
  };
  struct ChildSpec {
    int node;
    bool observed_child;  // child time fixed at obs_time vs. sampled + t_s
    double obs_time;      // valid when observed_child
    std::vector<ParentArc> parents;
  };

  const std::vector<ChildSpec>& children() const { return children_; }
  double base_time(int sample, int node) const {
    return base_[static_cast<std::size_t>(sample) * node_count_ + node];
  }
  /// Per-sample t_s-independent offset (minus the M denominators); -inf when
  /// the sampled world cannot carry the observation structure at all.
  double sample_offset(int sample) const { return offset_[sample]; }

 private:
  double sample_log_term(int sample, double t_s) const;

  int source_;
  int sample_count_;
  int node_count_;
  double shape_;
  double t_hi_;
  std::vector<ChildSpec> children_;  // observed factors first, then M factors
  std::vector<double> base_;         // sample-major L x N arrival table
  std::vector<double> offset_;      // per-sample constant
};

/// One-shot estimate of the incomplete-cascade likelihood at a single source
/// time. Builds a PhiEvaluator internally; prefer the class when evaluating
/// many t_s values.
LikelihoodEstimate phi_L(const Network& net, const ObservedCascade& obs,
                         int source, double t_s, const SampleBank& bank);

/// Per-sample exponential-profile coefficients at the configuration in force
/// at t_s (exponential kernels only).
std::vector<ExpTerm> export_exp_coefficients(const PhiEvaluator& evaluator,
                                             double t_s);

}  // namespace sleuth
