#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sleuth/likelihood.hpp"

namespace sleuth {

/// Per-piece maximization strategy.
///  - endpoints: evaluate the one-sided limits at both piece ends and keep the
///    larger; correct for exponential kernels, whose per-piece profile is a
///    positive combination of exponentials and therefore convex.
///  - golden: golden-section search (general kernels).
///  - two_point: interval shrinking by thirds, two evaluations per step.
///  - auto_select: endpoints for k = 1, golden otherwise.
enum class PieceSearch { auto_select, endpoints, golden, two_point };

struct PieceMaximum {
  double t = 0.0;
  double value = kNegInf;
  int evaluations = 0;
};

/// Maximize a continuous function on (a, b) to tolerance eps. Degenerate
/// intervals (b - a < eps) return the midpoint. Golden section performs at
/// most log((b-a)/eps)/log(1.618) + 2 evaluations, the two-point variant at
/// most 2 log((b-a)/eps)/log(3/2).
PieceMaximum maximize_piece(const std::function<double(double)>& f, double a,
                            double b, double eps,
                            PieceSearch method = PieceSearch::golden);

/// Exact endpoint comparison for an exponential-kernel piece given its
/// per-sample (log weight, rate) terms; value is log(sum_l w_l e^{r_l t} / L).
PieceMaximum maximize_exp_piece(std::span<const ExpTerm> terms, double a, double b);

/// Source times at which some node's feasible-parent set flips, i.e. the
/// boundaries of the continuous pieces of the likelihood profile:
/// t_i - base_j per sample for observed children i with hidden parent j, and
/// t_o - base_m per sample for hidden children m (in the M set) with observed
/// parent o. Restricted to (t_lo, min observed time), deduplicated within
/// 1e-12. Pass NaN as t_lo to use the evaluator's default lower bound.
std::vector<double> enumerate_change_points(const PhiEvaluator& evaluator,
                                            double t_lo, double kappa = 3.0);
std::vector<double> enumerate_change_points(const Network& net,
                                            const ObservedCascade& obs,
                                            int source, const SampleBank& bank,
                                            double t_lo = kNegInf,
                                            double kappa = 3.0);

/// Piecewise structure of the likelihood profile over the source time.
struct PiecewiseLikelihood {
  int source = -1;
  double t_lo = 0.0;
  double t_hi = 0.0;  // min observed time
  std::vector<double> change_points;
  const PhiEvaluator* evaluator = nullptr;

  int piece_count() const { return static_cast<int>(change_points.size()) + 1; }
  std::pair<double, double> piece(int index) const {
    const double lo = index == 0 ? t_lo : change_points[index - 1];
    const double hi = index == static_cast<int>(change_points.size())
                          ? t_hi
                          : change_points[index];
    return {lo, hi};
  }
};

PiecewiseLikelihood enumerate_pieces(const PhiEvaluator& evaluator,
                                     double t_lo = kNegInf, double kappa = 3.0);

/// One pass of the exponential-kernel sweep: one-sided profile limits at both
/// ends of every piece, obtained by updating only the factors of the node
/// whose feasible-parent set flips at each change point.
struct PieceSweepResult {
  std::vector<double> boundaries;   // t_lo, change points..., t_hi
  std::vector<double> value_left;   // per piece, limit at its left end
  std::vector<double> value_right;  // per piece, limit at its right end
  std::vector<int> dead_samples;    // per piece

  int piece_count() const { return static_cast<int>(value_left.size()); }
};

PieceSweepResult sweep_exp_pieces(const PhiEvaluator& evaluator,
                                  double t_lo = kNegInf, double kappa = 3.0);

struct SearchOptions {
  double t_lo = kNegInf;        // -inf: use the kappa rule
  double kappa = 3.0;
  double epsilon_rel = 1e-6;    // per-piece tolerance, relative to piece width
  double epsilon_floor = 1e-9;  // absolute floor
  PieceSearch method = PieceSearch::auto_select;
};

struct BestTimeResult {
  bool feasible = false;
  double t_star = 0.0;
  double log_phi = kNegInf;
  int change_point_count = 0;
  int piece_count = 0;
  int dropped_samples = 0;      // at the maximizing source time
  long long evaluations = 0;    // line-search evaluations (golden/two-point)
};

/// Global maximization of the likelihood profile over the source time:
/// enumerate the pieces, maximize each, return the best. The exponential
/// path sweeps the change points once, updating only the factors of the node
/// whose feasible-parent set flipped.
BestTimeResult best_time_for_source(const PhiEvaluator& evaluator,
                                    const SearchOptions& options = {});
BestTimeResult best_time_for_source(const Network& net,
                                    const ObservedCascade& obs, int source,
                                    const SampleBank& bank,
                                    const SearchOptions& options = {});

struct RankOptions {
  int sample_count = 400;
  std::uint64_t seed = 1;
  SearchOptions search;
};

struct SourceRanking {
  struct Entry {
    int node = -1;
    double total_log_likelihood = kNegInf;
    std::vector<double> best_ts;          // one per cascade
    std::vector<double> per_cascade_log;  // one per cascade
  };
  std::vector<Entry> entries;  // sorted by total desc, ties by node id

  // diagnostics
  long long total_pieces = 0;
  long long total_dropped_samples = 0;
  double wall_seconds = 0.0;

  bool empty() const { return entries.empty(); }
  int rank_of(int node) const;  // 1-based; 0 when absent
};

/// Rank every feasible candidate source by the sum over cascades of its
/// maximized log-likelihood. All cascades must refer to the same network;
/// each gets its own delay draws, shared across candidates.
SourceRanking rank_sources(const Network& net,
                           std::span<const ObservedCascade> cascades,
                           const RankOptions& options = {});

}  // namespace sleuth
