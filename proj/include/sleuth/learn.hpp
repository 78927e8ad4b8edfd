#pragma once

#include <string>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/likelihood.hpp"
#include "sleuth/simulate.hpp"

namespace sleuth {

/// Fully observed historical cascades used to fit transmission rates.
struct TrainingSet {
  std::vector<Cascade> cascades;
};

struct LearnConfig {
  double l1 = 0.0;                // penalty weight; negative selects it by validation
  int max_iterations = 5000;
  double tolerance = 1e-12;       // relative objective-decrease stopping rule
  double initial_rate = 1.0;      // starting value of each edge rate 1/alpha
  double prune_threshold = 1e-4;  // rates below this are reported as absent
  Censoring censoring = Censoring::on;
};

struct LearnReport {
  Network network;                 // retained edges with alpha = 1 / rate
  double l1_used = 0.0;
  int pruned_edges = 0;
  std::vector<std::string> warnings;

  struct NodeSolve {
    int node = -1;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    std::vector<double> trace;  // objective per iteration when not converged
  };
  std::vector<NodeSolve> solves;
};

/// Maximum-likelihood transmission rates over the candidate edge set, with an
/// l1 penalty on the rates. Exponential kernels only: the per-target-node
/// problems decouple and are convex in the rate parameterization 1/alpha.
/// Solved per node by projected gradient on the nonnegative orthant with a
/// backtracking line search.
LearnReport learn_rates(const Topology& candidates, const TrainingSet& train,
                        const LearnConfig& config = {});

/// All-pairs candidate edge set for structure-and-rates inference.
Topology complete_topology(int node_count);

/// Per candidate edge: number of cascades in which the parent was infected
/// strictly before the child (the observations that identify the rate).
struct EdgeCoverage {
  int src = -1;
  int dst = -1;
  long long usable = 0;
  bool identifiable = false;
};
std::vector<EdgeCoverage> coverage_report(const Topology& candidates,
                                          const TrainingSet& train);

}  // namespace sleuth
