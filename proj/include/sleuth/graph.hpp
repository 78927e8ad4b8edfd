#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "sleuth/rng.hpp"

namespace sleuth {

struct Edge {
  int src;
  int dst;
  double alpha;  // transmission scale for this edge
};

/// Bare directed edge structure, before transmission rates are assigned.
struct Topology {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;  // (src, dst), sorted, unique
};

/// Immutable directed diffusion network: edge list plus per-edge transmission
/// scale alpha and one global kernel shape k. Adjacency is built once at
/// construction; afterwards the object is safe for concurrent reads.
class Network {
 public:
  struct OutArc {
    int dst;
    int edge_id;
  };
  struct InArc {
    int src;
    double alpha;
    int edge_id;
  };

  /// Validates: dense ids in [0, node_count), no self-loops, no duplicate
  /// directed edges, alpha > 0, kernel_shape > 0. Throws std::invalid_argument.
  Network(int node_count, std::vector<Edge> edges, double kernel_shape);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  double kernel_shape() const { return kernel_shape_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const OutArc> out_arcs(int node) const {
    return {out_arcs_.data() + out_offsets_[node],
            out_arcs_.data() + out_offsets_[node + 1]};
  }
  std::span<const InArc> in_arcs(int node) const {
    return {in_arcs_.data() + in_offsets_[node],
            in_arcs_.data() + in_offsets_[node + 1]};
  }
  int out_degree(int node) const {
    return out_offsets_[node + 1] - out_offsets_[node];
  }
  int in_degree(int node) const {
    return in_offsets_[node + 1] - in_offsets_[node];
  }

 private:
  int node_count_;
  double kernel_shape_;
  std::vector<Edge> edges_;
  std::vector<int> out_offsets_, in_offsets_;
  std::vector<OutArc> out_arcs_;
  std::vector<InArc> in_arcs_;
};

/// All nodes reachable from `from` along directed paths, including `from`
/// itself. Sorted ascending.
std::vector<int> reachable_set(const Network& net, int from);

/// Hidden nodes that can reach every observed node; only these can explain
/// all observed infections. Sorted ascending. Throws if `observed` is empty.
std::vector<int> candidate_sources(const Network& net,
                                   std::span<const int> observed,
                                   std::span<const int> hidden);

/// Stochastic Kronecker benchmark generator.
struct KroneckerSpec {
  std::array<double, 4> seed;  // row-major 2x2 entry probabilities in [0, 1]
  int power = 1;               // node count is 2^power
  int target_edges = 0;
};

/// Per-entry Bernoulli sample of the Kronecker-power probability matrix
/// (self-loops excluded), before trimming to the target edge count.
Topology sample_kronecker(const KroneckerSpec& spec, Rng& rng);

/// sample_kronecker followed by an exact-count adjustment: surplus edges with
/// the lowest entry probability are dropped, missing ones are filled with the
/// highest-probability unsampled entries. Ties are broken at random.
Topology generate_kronecker(const KroneckerSpec& spec, Rng& rng);

/// Draw each edge scale alpha i.i.d. uniform on [rate_low, rate_high].
Network assign_rates(const Topology& topology, double rate_low,
                     double rate_high, double kernel_shape, Rng& rng);

}  // namespace sleuth
