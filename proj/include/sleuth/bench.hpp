#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/simulate.hpp"
#include "sleuth/sourceid.hpp"

namespace sleuth {

struct ExperimentConfig {
  // network: generated Kronecker benchmark, or loaded from file when set
  std::string network_type = "core-periphery";  // core-periphery|random|hierarchical
  std::string network_file;
  int power = 8;
  int edges = 512;
  double rate_low = 5.0;
  double rate_high = 10.0;
  double kernel_shape = 1.0;

  // trial protocol
  double window = 20.0;
  int source_trials = 10;
  int cascades_per_source = 10;
  int qualification_cascades = 100;  // pool size per candidate source
  int min_large_cascades = 10;       // required large cascades in the pool
  int large_threshold = 40;          // infected nodes for a cascade to count as large
  double observe_fraction = 0.1;
  int samples = 400;
  double epsilon = 1e-6;
  int baseline_simulations = 100;
  std::uint64_t seed = 1;

  // sensitivity sweeps
  bool run_sweeps = true;
  std::vector<double> sweep_observed = {0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<int> sweep_samples = {100, 200, 400, 800};
};

ExperimentConfig load_experiment_config(const std::string& path);

/// Generic score ranking shared by the two reference baselines.
struct BaselineRanking {
  std::vector<std::pair<int, double>> entries;  // (node, score) descending
  int rank_of(int node) const;
};

/// Forward-simulation baseline: from each feasible candidate, simulate and
/// count how many observed infected nodes fall inside the observation window;
/// candidates ranked by the average count.
BaselineRanking baseline_montecarlo(const Network& net,
                                    std::span<const ObservedCascade> cascades,
                                    int simulations, Rng rng);

/// Reachability-filtered out-degree baseline.
BaselineRanking baseline_outdegree(const Network& net,
                                   std::span<const ObservedCascade> cascades);

/// One identification attempt with known ground truth.
struct Trial {
  int true_source = -1;
  std::vector<double> true_ts;  // per cascade
  SourceRanking ranking;
};

struct MetricReport {
  int trials = 0;
  double success_probability = 0.0;
  double top10_success = 0.0;
  // squared error of the source-time estimates, for the top-ranked candidate
  // and (when it is a candidate at all) for the true source
  double mse_predicted = 0.0;
  double mse_true_source = 0.0;
};

MetricReport compute_metrics(std::span<const Trial> trials);

struct ExperimentResult {
  // index c holds the metrics when the first c+1 cascades are used
  std::vector<MetricReport> ours;
  std::vector<MetricReport> montecarlo;
  std::vector<MetricReport> outdegree;

  struct SweepPoint {
    double axis = 0.0;
    MetricReport metrics;
    double mean_identify_seconds = 0.0;
  };
  std::vector<SweepPoint> observed_sweep;
  std::vector<SweepPoint> samples_sweep;

  double mean_identify_seconds = 0.0;
  long long dropped_samples = 0;
  long long total_pieces = 0;
  std::vector<int> trial_sources;
};

/// Full benchmark pipeline: generate or load the network, qualify sources by
/// their large-cascade counts, simulate and mask cascades, identify with the
/// likelihood method and both baselines on identical inputs, and aggregate
/// the accuracy metrics per cascade count and per sweep point.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Emit metrics.tsv, sweep_observed.tsv, sweep_samples.tsv, runtime.tsv and
/// diagnostics.json under out_dir.
void write_experiment_outputs(const ExperimentResult& result,
                              const ExperimentConfig& config,
                              const std::string& out_dir);

}  // namespace sleuth
