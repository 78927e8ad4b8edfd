#include "sleuth/learn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sleuth/logspace.hpp"
#include "sleuth/parallel.hpp"

namespace sleuth {

namespace {

int cascade_source(const Cascade& cascade) {
  if (cascade.source >= 0) return cascade.source;
  int argmin = -1;
  double best = kInf;
  for (int v = 0; v < static_cast<int>(cascade.times.size()); ++v) {
    if (cascade.times[v] < best) {
      best = cascade.times[v];
      argmin = v;
    }
  }
  return argmin;
}

// Negative log-likelihood of one target node's in-rates, aggregated over all
// cascades. Survival and censoring terms are linear in the rates; each
// infected occurrence adds -log(sum of feasible rates).
struct NodeProblem {
  std::vector<int> parent_nodes;          // candidate parents, local indexing
  std::vector<double> linear;             // summed exposure per parent
  std::vector<std::vector<int>> hazard_sets;  // feasible parents per infection

  double objective(const std::vector<double>& rate, double l1) const {
    double f = 0.0;
    for (std::size_t j = 0; j < rate.size(); ++j)
      f += (linear[j] + l1) * rate[j];
    for (const auto& set : hazard_sets) {
      double s = 0.0;
      for (int j : set) s += rate[j];
      if (s <= 0.0) return kInf;
      f -= std::log(s);
    }
    return f;
  }

  void gradient(const std::vector<double>& rate, double l1,
                std::vector<double>& grad) const {
    for (std::size_t j = 0; j < rate.size(); ++j) grad[j] = linear[j] + l1;
    for (const auto& set : hazard_sets) {
      double s = 0.0;
      for (int j : set) s += rate[j];
      const double inv = 1.0 / s;
      for (int j : set) grad[j] -= inv;
    }
  }
};

NodeProblem build_node_problem(int target, const std::vector<int>& parents,
                               const TrainingSet& train, Censoring censoring) {
  NodeProblem problem;
  problem.parent_nodes = parents;
  problem.linear.assign(parents.size(), 0.0);

  for (std::size_t c = 0; c < train.cascades.size(); ++c) {
    const Cascade& cascade = train.cascades[c];
    const int source = cascade_source(cascade);
    if (target == source) continue;
    const double t_i = cascade.times[target];
    if (std::isfinite(t_i)) {
      std::vector<int> feasible;
      for (std::size_t j = 0; j < parents.size(); ++j) {
        const double gap = t_i - cascade.times[parents[j]];
        if (gap > 0.0) {
          problem.linear[j] += gap;
          feasible.push_back(static_cast<int>(j));
        }
      }
      if (feasible.empty())
        throw std::runtime_error(
            "learn_rates: cascade " + std::to_string(c) + " infects node " +
            std::to_string(target) + " with no feasible candidate parent");
      problem.hazard_sets.push_back(std::move(feasible));
    } else if (censoring == Censoring::on) {
      const double cutoff = cascade.times[source] + cascade.window;
      if (!std::isfinite(cutoff)) continue;
      for (std::size_t j = 0; j < parents.size(); ++j) {
        const double gap = cutoff - cascade.times[parents[j]];
        if (gap > 0.0) problem.linear[j] += gap;
      }
    }
  }
  return problem;
}

// Projected gradient with backtracking on the nonnegative orthant.
LearnReport::NodeSolve solve_node(const NodeProblem& problem, double l1,
                                  const LearnConfig& config,
                                  std::vector<double>& rate) {
  LearnReport::NodeSolve solve;
  const std::size_t dim = rate.size();
  std::vector<double> grad(dim), next(dim), trace;

  double f = problem.objective(rate, l1);
  trace.push_back(f);
  double step = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    problem.gradient(rate, l1, grad);
    double f_next = kInf;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      double quad = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        next[j] = std::max(0.0, rate[j] - step * grad[j]);
        const double d = next[j] - rate[j];
        quad += d * grad[j] + d * d / (2.0 * step);
      }
      f_next = problem.objective(next, l1);
      if (f_next <= f + quad + 1e-12 * (1.0 + std::fabs(f))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    solve.iterations = it + 1;
    if (!accepted) break;  // no admissible step left at float precision
    const double decrease = f - f_next;
    rate.swap(next);
    f = f_next;
    trace.push_back(f);
    step *= 1.25;
    if (decrease <= config.tolerance * (1.0 + std::fabs(f))) {
      solve.converged = true;
      break;
    }
  }
  solve.objective = f;
  if (!solve.converged) solve.trace = std::move(trace);
  return solve;
}

}  // namespace

Topology complete_topology(int node_count) {
  Topology topo;
  topo.node_count = node_count;
  for (int u = 0; u < node_count; ++u)
    for (int v = 0; v < node_count; ++v)
      if (u != v) topo.edges.emplace_back(u, v);
  return topo;
}

std::vector<EdgeCoverage> coverage_report(const Topology& candidates,
                                          const TrainingSet& train) {
  std::vector<EdgeCoverage> report;
  report.reserve(candidates.edges.size());
  for (auto [src, dst] : candidates.edges) {
    EdgeCoverage cov{src, dst, 0, false};
    for (const Cascade& cascade : train.cascades) {
      const double t_child = cascade.times[dst];
      if (std::isfinite(t_child) && cascade.times[src] < t_child) ++cov.usable;
    }
    cov.identifiable = cov.usable > 0;
    report.push_back(cov);
  }
  return report;
}

namespace {

LearnReport learn_with_l1(const Topology& candidates, const TrainingSet& train,
                          const LearnConfig& config, double l1) {
  const int n = candidates.node_count;

  // Candidate parents per target, keeping only edges with any exposure.
  std::vector<std::vector<int>> parents(n);
  for (auto [src, dst] : candidates.edges) parents[dst].push_back(src);

  std::vector<std::vector<Edge>> per_node_edges(n);
  std::vector<LearnReport::NodeSolve> solves(n);
  std::vector<int> pruned(n, 0);

  parallel_for(n, [&](int target) {
    if (parents[target].empty()) return;
    NodeProblem problem =
        build_node_problem(target, parents[target], train, config.censoring);

    // Drop parents with neither hazard membership nor exposure: no data ever
    // constrains them.
    std::vector<char> used(parents[target].size(), 0);
    for (const auto& set : problem.hazard_sets)
      for (int j : set) used[j] = 1;
    for (std::size_t j = 0; j < used.size(); ++j)
      if (problem.linear[j] > 0.0) used[j] = 1;

    std::vector<int> kept_parents;
    std::vector<double> kept_linear;
    std::vector<int> remap(parents[target].size(), -1);
    for (std::size_t j = 0; j < used.size(); ++j) {
      if (!used[j]) continue;
      remap[j] = static_cast<int>(kept_parents.size());
      kept_parents.push_back(problem.parent_nodes[j]);
      kept_linear.push_back(problem.linear[j]);
    }
    for (auto& set : problem.hazard_sets)
      for (int& j : set) j = remap[j];
    problem.parent_nodes = std::move(kept_parents);
    problem.linear = std::move(kept_linear);
    if (problem.parent_nodes.empty()) return;

    std::vector<double> rate(problem.parent_nodes.size(),
                             std::max(config.initial_rate, 1e-8));
    solves[target] = solve_node(problem, l1, config, rate);
    solves[target].node = target;

    for (std::size_t j = 0; j < rate.size(); ++j) {
      if (rate[j] >= config.prune_threshold) {
        per_node_edges[target].push_back(
            {problem.parent_nodes[j], target, 1.0 / rate[j]});
      } else {
        ++pruned[target];
      }
    }
  });

  std::vector<Edge> edges;
  LearnReport report{Network(n, {}, 1.0)};
  for (int v = 0; v < n; ++v) {
    edges.insert(edges.end(), per_node_edges[v].begin(), per_node_edges[v].end());
    report.pruned_edges += pruned[v];
    if (solves[v].node >= 0) report.solves.push_back(std::move(solves[v]));
  }
  report.network = Network(n, std::move(edges), 1.0);
  report.l1_used = l1;

  std::vector<char> covered(n, 0);
  for (const Cascade& cascade : train.cascades)
    for (int v = 0; v < n; ++v)
      if (std::isfinite(cascade.times[v])) covered[v] = 1;
  const long long uncovered = std::count(covered.begin(), covered.end(), 0);
  if (uncovered > 0)
    report.warnings.push_back(
        std::to_string(uncovered) +
        " node(s) never appear infected in the training cascades; their "
        "in-rates are unidentifiable");
  return report;
}

double validation_log_likelihood(const Network& net,
                                 std::span<const Cascade> cascades) {
  double total = 0.0;
  for (const Cascade& cascade : cascades) {
    Cascade adjusted = cascade;
    adjusted.source = cascade_source(cascade);
    total += complete_log_likelihood(net, adjusted, Censoring::on);
  }
  return total;
}

}  // namespace

LearnReport learn_rates(const Topology& candidates, const TrainingSet& train,
                        const LearnConfig& config) {
  if (train.cascades.empty())
    throw std::invalid_argument("learn_rates: empty training set");
  for (const Cascade& cascade : train.cascades)
    if (static_cast<int>(cascade.times.size()) != candidates.node_count)
      throw std::invalid_argument("learn_rates: cascade size mismatch");

  if (config.l1 >= 0.0) return learn_with_l1(candidates, train, config, config.l1);

  // Pick the penalty on a held-out fifth of the cascades, then refit on all.
  const std::size_t split = std::max<std::size_t>(1, train.cascades.size() * 4 / 5);
  TrainingSet fit{{train.cascades.begin(), train.cascades.begin() + split}};
  std::span<const Cascade> holdout{train.cascades.data() + split,
                                   train.cascades.size() - split};

  const double grid[] = {0.0, 0.01, 0.1, 1.0};
  double best_l1 = 0.0, best_score = kNegInf;
  for (double l1 : grid) {
    const LearnReport fit_report = learn_with_l1(candidates, fit, config, l1);
    const double score = holdout.empty()
                             ? -fit_report.solves.size()
                             : validation_log_likelihood(fit_report.network, holdout);
    if (score > best_score) {
      best_score = score;
      best_l1 = l1;
    }
  }
  return learn_with_l1(candidates, train, config, best_l1);
}

}  // namespace sleuth
