#include "sleuth/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sleuth {

Network::Network(int node_count, std::vector<Edge> edges, double kernel_shape)
    : node_count_(node_count), kernel_shape_(kernel_shape), edges_(std::move(edges)) {
  if (node_count_ <= 0) throw std::invalid_argument("node_count must be positive");
  if (!(kernel_shape_ > 0.0)) throw std::invalid_argument("kernel shape must be > 0");

  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src < 0 || e.src >= node_count_ || e.dst < 0 || e.dst >= node_count_)
      throw std::invalid_argument("edge endpoint out of range: " +
                                  std::to_string(e.src) + "->" + std::to_string(e.dst));
    if (e.src == e.dst)
      throw std::invalid_argument("self-loop at node " + std::to_string(e.src));
    if (!(e.alpha > 0.0))
      throw std::invalid_argument("edge " + std::to_string(e.src) + "->" +
                                  std::to_string(e.dst) + " has non-positive alpha");
    if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst)
      throw std::invalid_argument("duplicate edge " + std::to_string(e.src) + "->" +
                                  std::to_string(e.dst));
  }

  out_offsets_.assign(node_count_ + 1, 0);
  in_offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) {
    ++out_offsets_[e.src + 1];
    ++in_offsets_[e.dst + 1];
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());

  out_arcs_.resize(edges_.size());
  in_arcs_.resize(edges_.size());
  std::vector<int> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<int> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
    const Edge& e = edges_[id];
    out_arcs_[out_fill[e.src]++] = {e.dst, id};
    in_arcs_[in_fill[e.dst]++] = {e.src, e.alpha, id};
  }
}

std::vector<int> reachable_set(const Network& net, int from) {
  if (from < 0 || from >= net.node_count())
    throw std::invalid_argument("reachable_set: invalid node id " + std::to_string(from));
  std::vector<char> seen(net.node_count(), 0);
  std::deque<int> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const auto& arc : net.out_arcs(u)) {
      if (!seen[arc.dst]) {
        seen[arc.dst] = 1;
        queue.push_back(arc.dst);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < net.node_count(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

std::vector<int> candidate_sources(const Network& net, std::span<const int> observed,
                                   std::span<const int> hidden) {
  if (observed.empty())
    throw std::invalid_argument("candidate_sources: observed set is empty");

  // Intersect reverse-reachable sets of the observed nodes: one BFS per
  // observed node instead of one forward BFS per hidden node.
  std::vector<int> hits(net.node_count(), 0);
  std::vector<char> seen(net.node_count());
  for (int o : observed) {
    if (o < 0 || o >= net.node_count())
      throw std::invalid_argument("candidate_sources: invalid observed node id");
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> queue{o};
    seen[o] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto& arc : net.in_arcs(u)) {
        if (!seen[arc.src]) {
          seen[arc.src] = 1;
          queue.push_back(arc.src);
        }
      }
    }
    for (int v = 0; v < net.node_count(); ++v) hits[v] += seen[v];
  }

  const int need = static_cast<int>(observed.size());
  std::vector<int> out;
  for (int h : hidden)
    if (hits[h] == need) out.push_back(h);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_kronecker_spec(const KroneckerSpec& spec) {
  for (double p : spec.seed)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("kronecker seed entries must lie in [0, 1]");
  if (spec.power < 1 || spec.power > 12)
    throw std::invalid_argument("kronecker power must be in [1, 12]");
  if (spec.target_edges < 0)
    throw std::invalid_argument("target_edges must be nonnegative");
  const std::int64_t n = std::int64_t{1} << spec.power;
  if (spec.target_edges > n * (n - 1))
    throw std::invalid_argument("target_edges exceeds N(N-1)");
}

double entry_probability(const KroneckerSpec& spec, int u, int v) {
  double p = 1.0;
  for (int b = 0; b < spec.power; ++b)
    p *= spec.seed[((u >> b) & 1) * 2 + ((v >> b) & 1)];
  return p;
}

}  // namespace

Topology sample_kronecker(const KroneckerSpec& spec, Rng& rng) {
  check_kronecker_spec(spec);
  const int n = 1 << spec.power;
  Topology topo;
  topo.node_count = n;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const double p = entry_probability(spec, u, v);
      if (rng.next_unit() < p) topo.edges.emplace_back(u, v);
    }
  }
  return topo;
}

Topology generate_kronecker(const KroneckerSpec& spec, Rng& rng) {
  Topology topo = sample_kronecker(spec, rng);
  const int n = topo.node_count;
  const int have = static_cast<int>(topo.edges.size());

  struct Entry {
    double prob;
    std::uint64_t tie;
    int u, v;
  };

  if (have > spec.target_edges) {
    // Drop the lowest-probability sampled edges; random tie order.
    std::vector<Entry> entries;
    entries.reserve(topo.edges.size());
    for (auto [u, v] : topo.edges)
      entries.push_back({entry_probability(spec, u, v), rng.next_u64(), u, v});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.prob != b.prob ? a.prob > b.prob : a.tie < b.tie;
    });
    entries.resize(spec.target_edges);
    topo.edges.clear();
    for (const Entry& e : entries) topo.edges.emplace_back(e.u, e.v);
  } else if (have < spec.target_edges) {
    // Fill with the highest-probability unsampled positive-probability entries.
    std::vector<char> present(static_cast<std::size_t>(n) * n, 0);
    for (auto [u, v] : topo.edges) present[static_cast<std::size_t>(u) * n + v] = 1;
    std::vector<Entry> pool;
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (u == v || present[static_cast<std::size_t>(u) * n + v]) continue;
        const double p = entry_probability(spec, u, v);
        if (p > 0.0) pool.push_back({p, rng.next_u64(), u, v});
      }
    }
    const int missing = spec.target_edges - have;
    if (static_cast<int>(pool.size()) < missing)
      throw std::invalid_argument(
          "target_edges unreachable: not enough positive-probability entries");
    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
      return a.prob != b.prob ? a.prob > b.prob : a.tie < b.tie;
    });
    for (int i = 0; i < missing; ++i) topo.edges.emplace_back(pool[i].u, pool[i].v);
  }

  std::sort(topo.edges.begin(), topo.edges.end());
  return topo;
}

Network assign_rates(const Topology& topology, double rate_low, double rate_high,
                     double kernel_shape, Rng& rng) {
  if (!(rate_low > 0.0) || !(rate_high >= rate_low))
    throw std::invalid_argument("require 0 < rate_low <= rate_high");
  std::vector<Edge> edges;
  edges.reserve(topology.edges.size());
  for (auto [u, v] : topology.edges)
    edges.push_back({u, v, rate_low == rate_high ? rate_low : rng.uniform(rate_low, rate_high)});
  return Network(topology.node_count, std::move(edges), kernel_shape);
}

}  // namespace sleuth
