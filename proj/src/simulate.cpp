#include "sleuth/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include "sleuth/kernels.hpp"
#include "sleuth/parallel.hpp"

namespace sleuth {

int Cascade::infected_count() const {
  int n = 0;
  for (double t : times) n += std::isfinite(t);
  return n;
}

bool ObservedCascade::is_observed(int node) const {
  auto it = std::lower_bound(observed.begin(), observed.end(), node,
                             [](const auto& p, int v) { return p.first < v; });
  return it != observed.end() && it->first == node;
}

double ObservedCascade::observed_time(int node) const {
  auto it = std::lower_bound(observed.begin(), observed.end(), node,
                             [](const auto& p, int v) { return p.first < v; });
  if (it == observed.end() || it->first != node)
    throw std::invalid_argument("node " + std::to_string(node) + " is not observed");
  return it->second;
}

double ObservedCascade::min_observed_time() const {
  double m = kInf;
  for (const auto& [node, t] : observed) m = std::min(m, t);
  return m;
}

std::vector<int> ObservedCascade::observed_nodes() const {
  std::vector<int> out;
  out.reserve(observed.size());
  for (const auto& [node, t] : observed) out.push_back(node);
  return out;
}

std::vector<int> ObservedCascade::hidden_nodes() const {
  std::vector<int> out;
  out.reserve(node_count - observed.size());
  std::size_t k = 0;
  for (int v = 0; v < node_count; ++v) {
    if (k < observed.size() && observed[k].first == v) {
      ++k;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> shortest_path_times(const Network& net,
                                        std::span<const double> edge_times,
                                        int source) {
  if (source < 0 || source >= net.node_count())
    throw std::invalid_argument("shortest_path_times: invalid source id");
  if (static_cast<int>(edge_times.size()) != net.edge_count())
    throw std::invalid_argument("shortest_path_times: edge_times size mismatch");
  for (double w : edge_times)
    if (w < 0.0) throw std::invalid_argument("shortest_path_times: negative edge time");

  std::vector<double> dist(net.node_count(), kInf);
  dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;  // stale entry
    for (const auto& arc : net.out_arcs(u)) {
      const double nd = d + edge_times[arc.edge_id];
      if (nd < dist[arc.dst]) {
        dist[arc.dst] = nd;
        heap.emplace(nd, arc.dst);
      }
    }
  }
  return dist;
}

Cascade simulate_cascade(const Network& net, int source, double t_s,
                         double window, Rng& rng) {
  if (!(window > 0.0)) throw std::invalid_argument("simulate_cascade: window must be > 0");
  std::vector<double> delays(net.edge_count());
  for (int e = 0; e < net.edge_count(); ++e)
    delays[e] = kernels::sample(net.edges()[e].alpha, net.kernel_shape(), rng);

  Cascade cascade;
  cascade.source = source;
  cascade.window = window;
  cascade.times = shortest_path_times(net, delays, source);
  for (double& t : cascade.times) {
    t = std::isfinite(t) && t < window ? t_s + t : kInf;
  }
  return cascade;
}

ObservedCascade mask_cascade(const Cascade& cascade, double observe_fraction,
                             Rng& rng) {
  if (!(observe_fraction > 0.0 && observe_fraction <= 1.0))
    throw std::invalid_argument("mask_cascade: fraction must be in (0, 1]");
  std::vector<int> infected;
  for (int v = 0; v < static_cast<int>(cascade.times.size()); ++v)
    if (std::isfinite(cascade.times[v]) && v != cascade.source) infected.push_back(v);
  if (cascade.infected_count() < 2)
    throw std::invalid_argument("mask_cascade: need at least 2 infected nodes");

  const int keep = static_cast<int>(
      std::ceil(observe_fraction * static_cast<double>(infected.size())));
  // partial Fisher-Yates: the first `keep` slots are a uniform subset
  for (int i = 0; i < keep; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(infected.size() - i));
    std::swap(infected[i], infected[j]);
  }
  infected.resize(keep);
  std::sort(infected.begin(), infected.end());

  ObservedCascade obs;
  obs.node_count = static_cast<int>(cascade.times.size());
  obs.window = cascade.window;
  obs.source_hint = cascade.source;
  obs.observed.reserve(keep);
  for (int v : infected) obs.observed.emplace_back(v, cascade.times[v]);
  return obs;
}

SampleBank::SampleBank(const Network& net, int sample_count, const Rng& rng)
    : net_(&net), sample_count_(sample_count) {
  if (sample_count_ < 1) throw std::invalid_argument("SampleBank: sample count must be >= 1");
  const int e = net.edge_count();
  edge_times_.resize(static_cast<std::size_t>(sample_count_) * e);
  parallel_for(sample_count_, [&](int l) {
    Rng stream = rng.stream(static_cast<std::uint64_t>(l));
    double* row = edge_times_.data() + static_cast<std::size_t>(l) * e;
    for (int id = 0; id < e; ++id)
      row[id] = kernels::sample(net.edges()[id].alpha, net.kernel_shape(), stream);
  });
}

std::vector<double> SampleBank::base_times(int source) const {
  const int n = net_->node_count();
  std::vector<double> table(static_cast<std::size_t>(sample_count_) * n);
  parallel_for(sample_count_, [&](int l) {
    const auto row = shortest_path_times(*net_, edge_times(l), source);
    std::copy(row.begin(), row.end(), table.begin() + static_cast<std::size_t>(l) * n);
  });
  return table;
}

SampleBank build_sample_bank(const Network& net, int sample_count, const Rng& rng) {
  return SampleBank(net, sample_count, rng);
}

}  // namespace sleuth
