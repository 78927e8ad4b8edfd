#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/logspace.hpp"
#include "sleuth/rng.hpp"

namespace sleuth {

/// One full diffusion trace: absolute infection time per node, inf where the
/// node was not infected before the window closed.
struct Cascade {
  std::vector<double> times;
  int source = -1;
  double window = kInf;  // observation cut-off, measured from the source time

  int infected_count() const;
};

/// Partial view of a cascade: infection times for the observed nodes only.
/// Every node not listed is hidden (unknown state), including the source.
struct ObservedCascade {
  int node_count = 0;
  double window = kInf;
  int source_hint = -1;  // ground truth when known, -1 otherwise
  std::vector<std::pair<int, double>> observed;  // (node, time), sorted by node

  bool is_observed(int node) const;
  double observed_time(int node) const;  // throws if not observed
  double min_observed_time() const;
  std::vector<int> observed_nodes() const;
  std::vector<int> hidden_nodes() const;
};

/// Earliest-arrival times from `source` when edge (j,i) takes edge_times[id]
/// to traverse: t_i = min over directed paths of the summed delays, inf if
/// unreachable, 0 at the source. Dijkstra with a binary heap.
std::vector<double> shortest_path_times(const Network& net,
                                        std::span<const double> edge_times,
                                        int source);

/// Draw one delay per edge and propagate: times = t_s + shortest-path values,
/// truncated to inf at t_s + window.
Cascade simulate_cascade(const Network& net, int source, double t_s,
                         double window, Rng& rng);

/// Keep ceil(fraction * (#infected - 1)) uniformly chosen infected non-source
/// nodes as observed; the source itself is always hidden.
ObservedCascade mask_cascade(const Cascade& cascade, double observe_fraction,
                             Rng& rng);

/// L independent per-edge delay draws plus derived earliest-arrival tables.
///
/// The delay draws are shared by every candidate source (they do not depend
/// on the source or its start time), so rankings compare candidates under
/// common random numbers. Arrival times are computed with t_s = 0; shifting
/// the source time only offsets them: t_i(t_s) = base_times(s)[i] + t_s.
class SampleBank {
 public:
  SampleBank(const Network& net, int sample_count, const Rng& rng);

  int sample_count() const { return sample_count_; }
  const Network& network() const { return *net_; }

  std::span<const double> edge_times(int sample) const {
    const std::size_t e = net_->edge_count();
    return {edge_times_.data() + e * sample, e};
  }

  /// Earliest-arrival table for one candidate source, sample-major L x N.
  std::vector<double> base_times(int source) const;

 private:
  const Network* net_;
  int sample_count_;
  std::vector<double> edge_times_;  // sample-major L x E
};

SampleBank build_sample_bank(const Network& net, int sample_count, const Rng& rng);

}  // namespace sleuth
