#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sleuth/bench.hpp"
#include "sleuth/graph.hpp"
#include "sleuth/io.hpp"
#include "sleuth/learn.hpp"
#include "sleuth/simulate.hpp"
#include "sleuth/sourceid.hpp"

namespace sleuth {

namespace {

RunManifest start_manifest(std::uint64_t seed,
                           const std::vector<std::string>& inputs) {
  RunManifest manifest;
  manifest.master_seed = seed;
  for (const std::string& path : inputs)
    manifest.input_digests.emplace_back(path, fnv1a_digest_file(path));
  manifest.finalize_id();
  return manifest;
}

void write_manifest(RunManifest manifest, const std::string& path,
                    std::chrono::steady_clock::time_point start) {
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream out(path);
  out << manifest.to_json();
}

KroneckerSpec spec_for_type(const std::string& type, int power, int edges) {
  KroneckerSpec spec;
  if (type == "core-periphery") {
    spec.seed = {0.9, 0.5, 0.5, 0.3};
  } else if (type == "random") {
    spec.seed = {0.5, 0.5, 0.5, 0.5};
  } else if (type == "hierarchical") {
    spec.seed = {0.9, 0.1, 0.1, 0.9};
  } else {
    throw DataError("unknown network type '" + type + "'");
  }
  spec.power = power;
  spec.target_edges = edges;
  return spec;
}

int run_generate_network(const std::string& type, int power, int edges,
                         double rate_low, double rate_high, double kernel_shape,
                         std::uint64_t seed, const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const Rng master(seed);
  Rng topo_rng = master.stream(0);
  Rng rate_rng = master.stream(1);
  const Topology topo = generate_kronecker(spec_for_type(type, power, edges), topo_rng);
  const Network net = assign_rates(topo, rate_low, rate_high, kernel_shape, rate_rng);

  RunManifest manifest = start_manifest(seed, {});
  write_network(net, out_path, manifest.id);
  write_manifest(manifest, out_path + ".manifest.json", start);
  std::cout << "wrote " << out_path << " (" << net.node_count() << " nodes, "
            << net.edge_count() << " edges)\n";
  return 0;
}

int run_simulate(const std::string& net_path, int sources, int per_source,
                 double window, int min_infected, std::uint64_t seed,
                 const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = read_network(net_path);
  const Rng master(seed);
  Rng pick_rng = master.stream(0);

  std::vector<CascadeRecord> records;
  for (int s = 0; s < sources; ++s) {
    const int source = static_cast<int>(pick_rng.uniform_index(net.node_count()));
    Rng source_rng = master.stream(0x100 + s);
    int emitted = 0;
    for (int attempt = 0; attempt < 1000 * per_source && emitted < per_source;
         ++attempt) {
      Rng sim_rng = source_rng.stream(attempt);
      const Cascade cascade = simulate_cascade(net, source, 0.0, window, sim_rng);
      if (cascade.infected_count() <= min_infected) continue;
      records.push_back(to_record(cascade));
      ++emitted;
    }
    if (emitted < per_source)
      throw DataError("source " + std::to_string(source) +
                      " produced too few cascades above --min-infected");
  }

  RunManifest manifest = start_manifest(seed, {net_path});
  write_cascades(records, net.node_count(), out_path, manifest.id);
  write_manifest(manifest, out_path + ".manifest.json", start);
  std::cout << "wrote " << records.size() << " cascades to " << out_path << "\n";
  return 0;
}

int run_learn(const std::string& cascades_path, const std::string& topology_mode,
              const std::string& net_path, double l1, bool no_censoring,
              const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const auto records = read_cascades(cascades_path);
  if (records.empty()) throw DataError(cascades_path + ": no cascades");

  Topology topo;
  int node_count = 0;
  if (topology_mode == "known") {
    if (net_path.empty()) throw CLI::ValidationError("--topology known requires --net");
    const Network net = read_network(net_path);
    node_count = net.node_count();
    topo.node_count = node_count;
    for (const Edge& e : net.edges()) topo.edges.emplace_back(e.src, e.dst);
  } else if (topology_mode == "all-pairs") {
    for (const CascadeRecord& rec : records)
      for (const auto& [node, time] : rec.events) {
        (void)time;
        node_count = std::max(node_count, node + 1);
      }
    topo = complete_topology(node_count);
  } else {
    throw CLI::ValidationError("--topology must be 'known' or 'all-pairs'");
  }

  TrainingSet train;
  for (const CascadeRecord& rec : records)
    train.cascades.push_back(record_to_cascade(rec, node_count));

  LearnConfig config;
  config.l1 = l1;
  config.censoring = no_censoring ? Censoring::off : Censoring::on;
  const LearnReport report = learn_rates(topo, train, config);

  std::vector<std::string> inputs = {cascades_path};
  if (!net_path.empty()) inputs.push_back(net_path);
  RunManifest manifest = start_manifest(0, inputs);
  write_network(report.network, out_path, manifest.id);
  write_manifest(manifest, out_path + ".manifest.json", start);

  for (const std::string& warning : report.warnings)
    std::cerr << "warning: " << warning << "\n";
  for (const auto& solve : report.solves)
    if (!solve.converged)
      std::cerr << "warning: node " << solve.node << " stopped after "
                << solve.iterations << " iterations without meeting the tolerance\n";
  std::cout << "learned " << report.network.edge_count() << " edges (l1 = "
            << report.l1_used << ", pruned " << report.pruned_edges << ") -> "
            << out_path << "\n";
  return 0;
}

int run_identify(const std::string& net_path, const std::string& cascades_path,
                 int samples, double observe_fraction, int top, double epsilon,
                 std::uint64_t seed, bool lemma2_search, double t_lo, double kappa,
                 const std::string& out_path, const std::string& diag_path) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = read_network(net_path);
  const auto records = read_cascades(cascades_path);
  if (records.empty()) throw DataError(cascades_path + ": no cascades");

  const Rng master(seed);
  std::vector<ObservedCascade> observed;
  if (observe_fraction < 1.0) {
    Rng mask_rng = master.stream(1);
    for (std::size_t c = 0; c < records.size(); ++c) {
      const Cascade full = record_to_cascade(records[c], net.node_count());
      Rng one = mask_rng.stream(c);
      observed.push_back(mask_cascade(full, observe_fraction, one));
    }
  } else {
    for (const CascadeRecord& rec : records)
      observed.push_back(record_to_observed(rec, net.node_count()));
  }

  RankOptions options;
  options.sample_count = samples;
  options.seed = master.stream(2).next_u64();
  options.search.epsilon_rel = epsilon;
  options.search.t_lo = std::isnan(t_lo) ? kNegInf : t_lo;
  options.search.kappa = kappa;
  if (lemma2_search) options.search.method = PieceSearch::two_point;
  const SourceRanking ranking = rank_sources(net, observed, options);

  RunManifest manifest = start_manifest(seed, {net_path, cascades_path});

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw DataError("cannot write " + out_path);
    out = &file;
  }
  *out << "# manifest: " << manifest.id << "\n";
  *out << "rank\tnode\tbest_ts\ttotal_loglik\n";
  if (ranking.empty()) {
    std::cerr << "no feasible source: no hidden node reaches every observed "
                 "infection\n";
  }
  const int limit = top > 0 ? std::min<int>(top, ranking.entries.size())
                            : static_cast<int>(ranking.entries.size());
  for (int i = 0; i < limit; ++i) {
    const auto& entry = ranking.entries[i];
    *out << (i + 1) << "\t" << entry.node << "\t";
    for (std::size_t c = 0; c < entry.best_ts.size(); ++c) {
      if (c) *out << ",";
      *out << format_time(entry.best_ts[c]);
    }
    *out << "\t" << format_time(entry.total_log_likelihood) << "\n";
  }

  if (!diag_path.empty()) {
    std::ofstream diag(diag_path);
    diag << "{\n";
    diag << "  \"manifest\": \"" << manifest.id << "\",\n";
    diag << "  \"candidates\": " << ranking.entries.size() << ",\n";
    diag << "  \"cascades\": " << observed.size() << ",\n";
    diag << "  \"total_pieces\": " << ranking.total_pieces << ",\n";
    diag << "  \"dropped_samples\": " << ranking.total_dropped_samples << ",\n";
    diag << "  \"wall_seconds\": " << ranking.wall_seconds << "\n";
    diag << "}\n";
  }
  if (!out_path.empty())
    write_manifest(manifest, out_path + ".manifest.json", start);
  return 0;
}

int run_bench(const std::string& config_path, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_experiment_config(config_path);
  const ExperimentResult result = run_experiment(config);
  write_experiment_outputs(result, config, out_dir);
  RunManifest manifest = start_manifest(config.seed, {config_path});
  write_manifest(manifest, out_dir + "/manifest.json", start);
  std::cout << "wrote benchmark tables to " << out_dir << "\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"source identification on continuous-time diffusion networks"};
  app.require_subcommand(1);

  // generate-network
  auto* gen = app.add_subcommand("generate-network",
                                 "sample a Kronecker benchmark network");
  std::string gen_type = "core-periphery";
  int gen_power = 8, gen_edges = 512;
  double gen_rate_low = 5.0, gen_rate_high = 10.0, gen_shape = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "network.txt";
  gen->add_option("--type", gen_type, "core-periphery|random|hierarchical");
  gen->add_option("--power", gen_power, "node count is 2^power");
  gen->add_option("--edges", gen_edges, "exact edge count");
  gen->add_option("--rate-low", gen_rate_low, "uniform rate lower end");
  gen->add_option("--rate-high", gen_rate_high, "uniform rate upper end");
  gen->add_option("--kernel-shape", gen_shape, "Weibull shape (1 = exponential)");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--out", gen_out, "output network file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate cascades from random sources");
  std::string sim_net;
  int sim_sources = 1, sim_per_source = 10, sim_min_infected = 0;
  double sim_window = 20.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "cascades.txt";
  sim->add_option("--net", sim_net, "network file")->required();
  sim->add_option("--sources", sim_sources, "number of random sources");
  sim->add_option("--cascades-per-source", sim_per_source, "cascades per source");
  sim->add_option("--window", sim_window, "observation window length");
  sim->add_option("--min-infected", sim_min_infected,
                  "keep only cascades with more than this many infections");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--out", sim_out, "output cascade file");

  // learn
  auto* lrn = app.add_subcommand("learn", "fit transmission rates from cascades");
  std::string lrn_cascades, lrn_topology = "known", lrn_net, lrn_out = "learned.txt";
  double lrn_l1 = -1.0;
  bool lrn_no_censoring = false;
  lrn->add_option("--cascades", lrn_cascades, "training cascade file")->required();
  lrn->add_option("--topology", lrn_topology, "known|all-pairs");
  lrn->add_option("--net", lrn_net, "network file providing the known topology");
  lrn->add_option("--l1", lrn_l1, "penalty weight; negative = pick by validation");
  lrn->add_flag("--no-censoring", lrn_no_censoring,
                "drop the uninfected-by-the-window survival terms");
  lrn->add_option("--out", lrn_out, "output network file");

  // identify
  auto* idf = app.add_subcommand("identify", "rank candidate sources of cascades");
  std::string idf_net, idf_cascades, idf_out, idf_diag;
  int idf_samples = 400, idf_top = 10;
  double idf_fraction = 1.0, idf_epsilon = 1e-6, idf_t_lo = std::nan(""),
         idf_kappa = 3.0;
  std::uint64_t idf_seed = 1;
  bool idf_lemma2 = false;
  idf->add_option("--net", idf_net, "network file")->required();
  idf->add_option("--cascades", idf_cascades, "observed cascade file")->required();
  idf->add_option("--samples", idf_samples, "Monte Carlo sample count");
  idf->add_option("--observe-frac", idf_fraction,
                  "mask full cascades down to this observed fraction (< 1)");
  idf->add_option("--top", idf_top, "rows to print (0 = all)");
  idf->add_option("--epsilon", idf_epsilon, "relative per-piece search tolerance");
  idf->add_option("--t-lo", idf_t_lo, "explicit lower bound of the time search");
  idf->add_option("--kappa", idf_kappa, "lower-bound rule multiplier");
  idf->add_flag("--paper-lemma2-search", idf_lemma2,
                "use the two-point shrinking search inside each piece");
  idf->add_option("--seed", idf_seed, "master seed");
  idf->add_option("--out", idf_out, "ranking TSV (default: stdout)");
  idf->add_option("--diag", idf_diag, "diagnostics JSON file");

  // bench
  auto* ben = app.add_subcommand("bench", "run the benchmark experiment harness");
  std::string ben_config, ben_out = "bench-out";
  ben->add_option("--config", ben_config, "flat key = value config file")->required();
  ben->add_option("--out", ben_out, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return run_generate_network(gen_type, gen_power, gen_edges, gen_rate_low,
                                  gen_rate_high, gen_shape, gen_seed, gen_out);
    if (sim->parsed())
      return run_simulate(sim_net, sim_sources, sim_per_source, sim_window,
                          sim_min_infected, sim_seed, sim_out);
    if (lrn->parsed())
      return run_learn(lrn_cascades, lrn_topology, lrn_net, lrn_l1,
                       lrn_no_censoring, lrn_out);
    if (idf->parsed())
      return run_identify(idf_net, idf_cascades, idf_samples, idf_fraction,
                          idf_top, idf_epsilon, idf_seed, idf_lemma2, idf_t_lo,
                          idf_kappa, idf_out, idf_diag);
    if (ben->parsed()) return run_bench(ben_config, ben_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace sleuth
