#include "sleuth/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sleuth/io.hpp"
#include "sleuth/likelihood.hpp"
#include "sleuth/parallel.hpp"

namespace sleuth {

namespace {

constexpr std::uint64_t kTagNetwork = 1;
constexpr std::uint64_t kTagQualify = 2;
constexpr std::uint64_t kTagCascades = 3;
constexpr std::uint64_t kTagMask = 4;
constexpr std::uint64_t kTagRank = 5;
constexpr std::uint64_t kTagBaseline = 6;
constexpr std::uint64_t kTagPick = 7;
constexpr std::uint64_t kTagSweepObserved = 8;
constexpr std::uint64_t kTagSweepSamples = 9;

Network make_network(const ExperimentConfig& cfg, Rng rng) {
  if (!cfg.network_file.empty()) return read_network(cfg.network_file);
  KroneckerSpec spec;
  if (cfg.network_type == "core-periphery") {
    spec.seed = {0.9, 0.5, 0.5, 0.3};
  } else if (cfg.network_type == "random") {
    spec.seed = {0.5, 0.5, 0.5, 0.5};
  } else if (cfg.network_type == "hierarchical") {
    spec.seed = {0.9, 0.1, 0.1, 0.9};
  } else {
    throw std::invalid_argument("unknown network type '" + cfg.network_type + "'");
  }
  spec.power = cfg.power;
  spec.target_edges = cfg.edges;
  Rng topo_rng = rng.stream(0);
  Rng rate_rng = rng.stream(1);
  const Topology topo = generate_kronecker(spec, topo_rng);
  return assign_rates(topo, cfg.rate_low, cfg.rate_high, cfg.kernel_shape, rate_rng);
}

std::vector<int> qualifying_sources(const Network& net, const ExperimentConfig& cfg,
                                    Rng rng) {
  std::vector<int> large_counts(net.node_count(), 0);
  parallel_for(net.node_count(), [&](int v) {
    Rng node_rng = rng.stream(v);
    int large = 0;
    for (int i = 0; i < cfg.qualification_cascades; ++i) {
      Rng sim_rng = node_rng.stream(i);
      const Cascade cascade = simulate_cascade(net, v, 0.0, cfg.window, sim_rng);
      if (cascade.infected_count() > cfg.large_threshold) ++large;
    }
    large_counts[v] = large;
  });
  std::vector<int> qualifying;
  for (int v = 0; v < net.node_count(); ++v)
    if (large_counts[v] >= cfg.min_large_cascades) qualifying.push_back(v);
  return qualifying;
}

std::vector<Cascade> large_cascades_from(const Network& net, int source,
                                         const ExperimentConfig& cfg, Rng rng) {
  std::vector<Cascade> out;
  const int max_attempts = 20 * std::max(cfg.qualification_cascades, 10);
  for (int attempt = 0;
       attempt < max_attempts && static_cast<int>(out.size()) < cfg.cascades_per_source;
       ++attempt) {
    Rng sim_rng = rng.stream(attempt);
    Cascade cascade = simulate_cascade(net, source, 0.0, cfg.window, sim_rng);
    if (cascade.infected_count() > cfg.large_threshold) out.push_back(std::move(cascade));
  }
  if (static_cast<int>(out.size()) < cfg.cascades_per_source)
    throw std::runtime_error("source " + std::to_string(source) +
                             " stopped producing large cascades");
  return out;
}

// Per-candidate likelihood maxima for every cascade prefix. A candidate is
// evaluated on cascade c only while it stays feasible for cascades 0..c,
// which is exactly the set the prefix ranking at c+1 needs.
struct PrefixEval {
  struct Candidate {
    int node = -1;
    int feasible_upto = 0;
    std::vector<double> logs;
    std::vector<double> ts;
  };
  std::vector<Candidate> candidates;
  double identify_seconds = 0.0;
  long long pieces = 0;
  long long dropped = 0;
};

PrefixEval evaluate_prefixes(const Network& net,
                             std::span<const ObservedCascade> cascades,
                             int sample_count, double epsilon, Rng rng) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t count = cascades.size();

  std::vector<std::vector<char>> member(count);
  std::vector<int> base_candidates;
  for (std::size_t c = 0; c < count; ++c) {
    const auto obs_nodes = cascades[c].observed_nodes();
    const auto hidden = cascades[c].hidden_nodes();
    const auto cand = candidate_sources(net, obs_nodes, hidden);
    member[c].assign(net.node_count(), 0);
    for (int v : cand) member[c][v] = 1;
    if (c == 0) base_candidates = cand;
  }

  std::vector<SampleBank> banks;
  banks.reserve(count);
  for (std::size_t c = 0; c < count; ++c)
    banks.emplace_back(net, sample_count, rng.stream(c));

  SearchOptions search;
  search.epsilon_rel = epsilon;

  PrefixEval eval;
  eval.candidates.resize(base_candidates.size());
  std::vector<long long> pieces(base_candidates.size(), 0);
  std::vector<long long> dropped(base_candidates.size(), 0);
  parallel_for(static_cast<int>(base_candidates.size()), [&](int idx) {
    PrefixEval::Candidate cand;
    cand.node = base_candidates[idx];
    for (std::size_t c = 0; c < count; ++c) {
      if (!member[c][cand.node]) break;
      const BestTimeResult best =
          best_time_for_source(net, cascades[c], cand.node, banks[c], search);
      cand.logs.push_back(best.log_phi);
      cand.ts.push_back(best.t_star);
      cand.feasible_upto = static_cast<int>(c) + 1;
      pieces[idx] += best.piece_count;
      dropped[idx] += best.dropped_samples;
    }
    eval.candidates[idx] = std::move(cand);
  });
  eval.pieces = std::accumulate(pieces.begin(), pieces.end(), 0LL);
  eval.dropped = std::accumulate(dropped.begin(), dropped.end(), 0LL);
  eval.identify_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return eval;
}

SourceRanking ranking_at(const PrefixEval& eval, int prefix) {
  SourceRanking ranking;
  for (const auto& cand : eval.candidates) {
    if (cand.feasible_upto < prefix) continue;
    SourceRanking::Entry entry;
    entry.node = cand.node;
    entry.total_log_likelihood = 0.0;
    for (int c = 0; c < prefix; ++c) {
      entry.total_log_likelihood += cand.logs[c];
      entry.per_cascade_log.push_back(cand.logs[c]);
      entry.best_ts.push_back(cand.ts[c]);
    }
    ranking.entries.push_back(std::move(entry));
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.total_log_likelihood != b.total_log_likelihood)
                return a.total_log_likelihood > b.total_log_likelihood;
              return a.node < b.node;
            });
  return ranking;
}

// Everything the two baselines need, captured while the trial network is in
// scope. The forward-simulation baseline scores every always-hidden node (a
// node that cannot reach the observations simply scores 0 and sinks to the
// bottom); the out-degree baseline keeps only candidates that can reach all
// observed infections.
struct BaselineScores {
  std::vector<int> hidden;                      // hidden in every cascade
  std::vector<int> out_degree;                  // per hidden node
  std::vector<std::vector<double>> montecarlo;  // [hidden idx][cascade]
  std::vector<std::vector<char>> feasible;      // [cascade][node]
};

BaselineScores compute_baseline_scores(const Network& net,
                                       std::span<const ObservedCascade> cascades,
                                       int simulations, Rng rng) {
  BaselineScores scores;
  scores.feasible.resize(cascades.size());
  std::vector<int> hidden_count(net.node_count(), 0);
  for (std::size_t c = 0; c < cascades.size(); ++c) {
    const auto obs_nodes = cascades[c].observed_nodes();
    const auto hidden = cascades[c].hidden_nodes();
    for (int v : hidden) ++hidden_count[v];
    const auto cand = candidate_sources(net, obs_nodes, hidden);
    scores.feasible[c].assign(net.node_count(), 0);
    for (int v : cand) scores.feasible[c][v] = 1;
  }
  for (int v = 0; v < net.node_count(); ++v)
    if (hidden_count[v] == static_cast<int>(cascades.size())) scores.hidden.push_back(v);

  for (int v : scores.hidden) scores.out_degree.push_back(net.out_degree(v));
  scores.montecarlo.assign(scores.hidden.size(),
                           std::vector<double>(cascades.size(), 0.0));
  double max_window = 0.0;
  for (const auto& obs : cascades) max_window = std::max(max_window, obs.window);
  parallel_for(static_cast<int>(scores.hidden.size()), [&](int idx) {
    const int v = scores.hidden[idx];
    Rng cand_rng = rng.stream(v);
    for (int run = 0; run < simulations; ++run) {
      Rng sim_rng = cand_rng.stream(run);
      const Cascade sim = simulate_cascade(net, v, 0.0, max_window, sim_rng);
      for (std::size_t c = 0; c < cascades.size(); ++c) {
        int covered = 0;
        for (const auto& [node, time] : cascades[c].observed) {
          (void)time;
          if (sim.times[node] < cascades[c].window) ++covered;
        }
        scores.montecarlo[idx][c] += covered;
      }
    }
    for (std::size_t c = 0; c < cascades.size(); ++c)
      scores.montecarlo[idx][c] /= static_cast<double>(simulations);
  });
  return scores;
}

BaselineRanking montecarlo_ranking_at(const BaselineScores& scores, int prefix) {
  BaselineRanking ranking;
  for (std::size_t idx = 0; idx < scores.hidden.size(); ++idx) {
    double score = 0.0;
    for (int c = 0; c < prefix; ++c) score += scores.montecarlo[idx][c];
    ranking.entries.emplace_back(scores.hidden[idx], score / prefix);
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return ranking;
}

BaselineRanking outdegree_ranking_at(const BaselineScores& scores, int prefix) {
  BaselineRanking ranking;
  for (std::size_t idx = 0; idx < scores.hidden.size(); ++idx) {
    const int v = scores.hidden[idx];
    bool ok = true;
    for (int c = 0; c < prefix && ok; ++c) ok = scores.feasible[c][v];
    if (!ok) continue;
    ranking.entries.emplace_back(v, static_cast<double>(scores.out_degree[idx]));
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return ranking;
}

MetricReport baseline_metrics(std::span<const BaselineRanking> rankings,
                              std::span<const int> true_sources) {
  MetricReport report;
  report.trials = static_cast<int>(rankings.size());
  for (std::size_t t = 0; t < rankings.size(); ++t) {
    const int rank = rankings[t].rank_of(true_sources[t]);
    if (rank == 1) report.success_probability += 1.0;
    if (rank >= 1 && rank <= 10) report.top10_success += 1.0;
  }
  if (report.trials > 0) {
    report.success_probability /= report.trials;
    report.top10_success /= report.trials;
  }
  return report;
}

struct SweepAccumulator {
  double axis = 0.0;
  std::vector<Trial> trials;
  double seconds_sum = 0.0;

  ExperimentResult::SweepPoint finish() const {
    ExperimentResult::SweepPoint point;
    point.axis = axis;
    point.metrics = compute_metrics(trials);
    point.mean_identify_seconds = seconds_sum / std::max<std::size_t>(1, trials.size());
    return point;
  }
};

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  const FlatConfig flat = FlatConfig::parse_file(path);
  ExperimentConfig cfg;
  cfg.network_type = flat.get_string("network_type", cfg.network_type);
  cfg.network_file = flat.get_string("network_file", cfg.network_file);
  cfg.power = static_cast<int>(flat.get_int("power", cfg.power));
  cfg.edges = static_cast<int>(flat.get_int("edges", cfg.edges));
  cfg.rate_low = flat.get_double("rate_low", cfg.rate_low);
  cfg.rate_high = flat.get_double("rate_high", cfg.rate_high);
  cfg.kernel_shape = flat.get_double("kernel_shape", cfg.kernel_shape);
  cfg.window = flat.get_double("window", cfg.window);
  cfg.source_trials = static_cast<int>(flat.get_int("source_trials", cfg.source_trials));
  cfg.cascades_per_source =
      static_cast<int>(flat.get_int("cascades_per_source", cfg.cascades_per_source));
  cfg.qualification_cascades = static_cast<int>(
      flat.get_int("qualification_cascades", cfg.qualification_cascades));
  cfg.min_large_cascades =
      static_cast<int>(flat.get_int("min_large_cascades", cfg.min_large_cascades));
  cfg.large_threshold =
      static_cast<int>(flat.get_int("large_threshold", cfg.large_threshold));
  cfg.observe_fraction = flat.get_double("observe_fraction", cfg.observe_fraction);
  cfg.samples = static_cast<int>(flat.get_int("samples", cfg.samples));
  cfg.epsilon = flat.get_double("epsilon", cfg.epsilon);
  cfg.baseline_simulations =
      static_cast<int>(flat.get_int("baseline_simulations", cfg.baseline_simulations));
  cfg.seed = static_cast<std::uint64_t>(flat.get_int("seed", cfg.seed));
  cfg.run_sweeps = flat.get_bool("run_sweeps", cfg.run_sweeps);
  cfg.sweep_observed = flat.get_double_list("sweep_observed", cfg.sweep_observed);
  const auto samples_list = flat.get_double_list(
      "sweep_samples",
      std::vector<double>(cfg.sweep_samples.begin(), cfg.sweep_samples.end()));
  cfg.sweep_samples.assign(samples_list.begin(), samples_list.end());
  return cfg;
}

int BaselineRanking::rank_of(int node) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].first == node) return static_cast<int>(i) + 1;
  return 0;
}

BaselineRanking baseline_montecarlo(const Network& net,
                                    std::span<const ObservedCascade> cascades,
                                    int simulations, Rng rng) {
  const BaselineScores scores =
      compute_baseline_scores(net, cascades, simulations, rng);
  return montecarlo_ranking_at(scores, static_cast<int>(cascades.size()));
}

BaselineRanking baseline_outdegree(const Network& net,
                                   std::span<const ObservedCascade> cascades) {
  const BaselineScores scores = compute_baseline_scores(net, cascades, 1, Rng(0));
  return outdegree_ranking_at(scores, static_cast<int>(cascades.size()));
}

MetricReport compute_metrics(std::span<const Trial> trials) {
  if (trials.empty()) throw std::invalid_argument("compute_metrics: no trials");
  MetricReport report;
  report.trials = static_cast<int>(trials.size());
  double mse_pred_sum = 0.0;
  int mse_pred_n = 0;
  double mse_true_sum = 0.0;
  int mse_true_n = 0;

  auto mean_sq_error = [](const SourceRanking::Entry& entry,
                          std::span<const double> truth) {
    double err = 0.0;
    for (std::size_t c = 0; c < entry.best_ts.size(); ++c) {
      const double t = c < truth.size() ? truth[c] : 0.0;
      err += (entry.best_ts[c] - t) * (entry.best_ts[c] - t);
    }
    return err / entry.best_ts.size();
  };

  for (const Trial& trial : trials) {
    const int rank = trial.ranking.rank_of(trial.true_source);
    if (rank == 1) report.success_probability += 1.0;
    if (rank >= 1 && rank <= 10) report.top10_success += 1.0;

    if (!trial.ranking.entries.empty() &&
        !trial.ranking.entries.front().best_ts.empty()) {
      mse_pred_sum += mean_sq_error(trial.ranking.entries.front(), trial.true_ts);
      ++mse_pred_n;
    }
    if (rank >= 1 && !trial.ranking.entries[rank - 1].best_ts.empty()) {
      mse_true_sum += mean_sq_error(trial.ranking.entries[rank - 1], trial.true_ts);
      ++mse_true_n;
    }
  }
  report.success_probability /= report.trials;
  report.top10_success /= report.trials;
  report.mse_predicted = mse_pred_n > 0 ? mse_pred_sum / mse_pred_n : 0.0;
  report.mse_true_source = mse_true_n > 0 ? mse_true_sum / mse_true_n : 0.0;
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Rng master(cfg.seed);
  ExperimentResult result;

  struct TrialData {
    int true_source = -1;
    PrefixEval ours;
    BaselineScores baselines;
  };
  std::vector<TrialData> trials;

  std::vector<SweepAccumulator> observed_sweep, samples_sweep;
  if (cfg.run_sweeps) {
    for (double f : cfg.sweep_observed)
      observed_sweep.push_back({f, {}, 0.0});
    for (int l : cfg.sweep_samples)
      samples_sweep.push_back({static_cast<double>(l), {}, 0.0});
  }

  for (int t = 0; t < cfg.source_trials; ++t) {
    const Rng trial_rng = master.stream(0x1000 + t);
    const Network net = make_network(cfg, trial_rng.stream(kTagNetwork));
    const auto qualifying = qualifying_sources(net, cfg, trial_rng.stream(kTagQualify));
    if (qualifying.empty())
      throw std::runtime_error("trial " + std::to_string(t) +
                               ": no source with enough large cascades; widen the "
                               "window or lower the threshold");
    Rng pick_rng = trial_rng.stream(kTagPick);
    const int source = qualifying[pick_rng.uniform_index(qualifying.size())];

    const auto cascades =
        large_cascades_from(net, source, cfg, trial_rng.stream(kTagCascades));

    TrialData data;
    data.true_source = source;
    std::vector<ObservedCascade> observed;
    Rng mask_rng = trial_rng.stream(kTagMask);
    for (std::size_t c = 0; c < cascades.size(); ++c) {
      Rng one = mask_rng.stream(c);
      observed.push_back(mask_cascade(cascades[c], cfg.observe_fraction, one));
    }
    data.ours = evaluate_prefixes(net, observed, cfg.samples, cfg.epsilon,
                                  trial_rng.stream(kTagRank));
    data.baselines = compute_baseline_scores(
        net, observed, cfg.baseline_simulations, trial_rng.stream(kTagBaseline));
    result.mean_identify_seconds += data.ours.identify_seconds;
    result.dropped_samples += data.ours.dropped;
    result.total_pieces += data.ours.pieces;
    result.trial_sources.push_back(source);
    trials.push_back(std::move(data));

    if (cfg.run_sweeps) {
      RankOptions rank_options;
      rank_options.search.epsilon_rel = cfg.epsilon;
      const Rng sweep_obs_rng = trial_rng.stream(kTagSweepObserved);
      for (std::size_t p = 0; p < cfg.sweep_observed.size(); ++p) {
        Rng point_rng = sweep_obs_rng.stream(p);
        std::vector<ObservedCascade> remasked;
        for (std::size_t c = 0; c < cascades.size(); ++c) {
          Rng one = point_rng.stream(c);
          remasked.push_back(mask_cascade(cascades[c], cfg.sweep_observed[p], one));
        }
        rank_options.sample_count = cfg.samples;
        rank_options.seed = point_rng.next_u64();
        const SourceRanking ranking = rank_sources(net, remasked, rank_options);
        Trial trial;
        trial.true_source = source;
        trial.true_ts.assign(cascades.size(), 0.0);
        trial.ranking = ranking;
        observed_sweep[p].trials.push_back(std::move(trial));
        observed_sweep[p].seconds_sum += ranking.wall_seconds;
      }
      const Rng sweep_l_rng = trial_rng.stream(kTagSweepSamples);
      for (std::size_t p = 0; p < cfg.sweep_samples.size(); ++p) {
        Rng point_rng = sweep_l_rng.stream(p);
        rank_options.sample_count = cfg.sweep_samples[p];
        rank_options.seed = point_rng.next_u64();
        const SourceRanking ranking = rank_sources(net, observed, rank_options);
        Trial trial;
        trial.true_source = source;
        trial.true_ts.assign(cascades.size(), 0.0);
        trial.ranking = ranking;
        samples_sweep[p].trials.push_back(std::move(trial));
        samples_sweep[p].seconds_sum += ranking.wall_seconds;
      }
    }
  }
  result.mean_identify_seconds /= std::max(1, cfg.source_trials);

  for (int prefix = 1; prefix <= cfg.cascades_per_source; ++prefix) {
    std::vector<Trial> our_trials;
    std::vector<BaselineRanking> mc, deg;
    std::vector<int> sources;
    for (const TrialData& data : trials) {
      Trial trial;
      trial.true_source = data.true_source;
      trial.true_ts.assign(prefix, 0.0);
      trial.ranking = ranking_at(data.ours, prefix);
      our_trials.push_back(std::move(trial));
      mc.push_back(montecarlo_ranking_at(data.baselines, prefix));
      deg.push_back(outdegree_ranking_at(data.baselines, prefix));
      sources.push_back(data.true_source);
    }
    result.ours.push_back(compute_metrics(our_trials));
    result.montecarlo.push_back(baseline_metrics(mc, sources));
    result.outdegree.push_back(baseline_metrics(deg, sources));
  }

  for (const auto& acc : observed_sweep) result.observed_sweep.push_back(acc.finish());
  for (const auto& acc : samples_sweep) result.samples_sweep.push_back(acc.finish());
  return result;
}

void write_experiment_outputs(const ExperimentResult& result,
                              const ExperimentConfig& config,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "metrics.tsv");
    out << "cascades\tsp\ttop10_sp\tmse_predicted\tmse_true_source"
        << "\tsp_montecarlo\ttop10_montecarlo\tsp_outdegree\ttop10_outdegree\n";
    for (std::size_t c = 0; c < result.ours.size(); ++c) {
      out << (c + 1) << "\t" << format_time(result.ours[c].success_probability)
          << "\t" << format_time(result.ours[c].top10_success) << "\t"
          << format_time(result.ours[c].mse_predicted) << "\t"
          << format_time(result.ours[c].mse_true_source) << "\t"
          << format_time(result.montecarlo[c].success_probability) << "\t"
          << format_time(result.montecarlo[c].top10_success) << "\t"
          << format_time(result.outdegree[c].success_probability) << "\t"
          << format_time(result.outdegree[c].top10_success) << "\n";
    }
  }

  auto write_sweep = [&](const std::string& name, const char* axis,
                         const std::vector<ExperimentResult::SweepPoint>& points) {
    std::ofstream out(fs::path(out_dir) / name);
    out << axis << "\tsp\ttop10_sp\tmse_predicted\tmse_true_source\n";
    for (const auto& point : points) {
      out << format_time(point.axis) << "\t"
          << format_time(point.metrics.success_probability) << "\t"
          << format_time(point.metrics.top10_success) << "\t"
          << format_time(point.metrics.mse_predicted) << "\t"
          << format_time(point.metrics.mse_true_source) << "\n";
    }
  };
  write_sweep("sweep_observed.tsv", "observed_fraction", result.observed_sweep);
  write_sweep("sweep_samples.tsv", "samples", result.samples_sweep);

  {
    // wall-clock data: intentionally separated from the deterministic tables
    std::ofstream out(fs::path(out_dir) / "runtime.tsv");
    out << "sweep\taxis\tmean_identify_seconds\n";
    for (const auto& point : result.observed_sweep)
      out << "observed_fraction\t" << format_time(point.axis) << "\t"
          << point.mean_identify_seconds << "\n";
    for (const auto& point : result.samples_sweep)
      out << "samples\t" << format_time(point.axis) << "\t"
          << point.mean_identify_seconds << "\n";
  }

  {
    std::ofstream out(fs::path(out_dir) / "diagnostics.json");
    out << "{\n";
    out << "  \"seed\": " << config.seed << ",\n";
    out << "  \"network_type\": \"" << config.network_type << "\",\n";
    out << "  \"trials\": " << config.source_trials << ",\n";
    out << "  \"samples\": " << config.samples << ",\n";
    out << "  \"observe_fraction\": " << config.observe_fraction << ",\n";
    out << "  \"trial_sources\": [";
    for (std::size_t i = 0; i < result.trial_sources.size(); ++i) {
      if (i) out << ", ";
      out << result.trial_sources[i];
    }
    out << "],\n";
    out << "  \"total_pieces\": " << result.total_pieces << ",\n";
    out << "  \"dropped_samples\": " << result.dropped_samples << ",\n";
    out << "  \"mean_identify_seconds\": " << result.mean_identify_seconds << "\n";
    out << "}\n";
  }
}

}  // namespace sleuth
