#include <doctest.h>

#include <algorithm>
#include <set>

#include "sleuth/graph.hpp"

using namespace sleuth;

namespace {

Network chain3() {
  return Network(3, {{0, 1, 1.0}, {1, 2, 1.0}}, 1.0);
}

}  // namespace

TEST_CASE("network invariants are enforced at construction") {
  CHECK_THROWS_AS(Network(2, {{0, 0, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Network(2, {{0, 1, 1.0}, {0, 1, 2.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Network(2, {{0, 1, -1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Network(2, {{0, 2, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Network(2, {{0, 1, 1.0}}, 0.0), std::invalid_argument);
}

TEST_CASE("reachable_set on chains and disconnected graphs") {
  const Network chain = chain3();
  CHECK(reachable_set(chain, 0) == std::vector<int>{0, 1, 2});
  CHECK(reachable_set(chain, 2) == std::vector<int>{2});
  const Network two(4, {{0, 1, 1.0}, {2, 3, 1.0}}, 1.0);
  CHECK(reachable_set(two, 0) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(reachable_set(chain, 5), std::invalid_argument);
}

TEST_CASE("candidate_sources follows reachability") {
  const Network chain = chain3();
  const std::vector<int> o1{2}, h1{0, 1};
  CHECK(candidate_sources(chain, o1, h1) == std::vector<int>{0, 1});
  const std::vector<int> o2{1, 2}, h2{0};
  CHECK(candidate_sources(chain, o2, h2) == std::vector<int>{0});

  const Network star(3, {{0, 1, 1.0}, {0, 2, 1.0}}, 1.0);
  const std::vector<int> obs{1, 2};
  CHECK(candidate_sources(star, obs, std::vector<int>{0}) == std::vector<int>{0});
  CHECK(candidate_sources(star, obs, std::vector<int>{1}).empty());
  CHECK_THROWS_AS(candidate_sources(chain, std::vector<int>{}, h1),
                  std::invalid_argument);
}

TEST_CASE("candidate_sources output stays within the hidden set") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 5, 64};
    Rng gen = rng.stream(rep);
    const Topology topo = generate_kronecker(spec, gen);
    const Network net = assign_rates(topo, 1.0, 2.0, 1.0, gen);
    std::vector<int> observed, hidden;
    for (int v = 0; v < net.node_count(); ++v)
      (gen.next_unit() < 0.2 ? observed : hidden).push_back(v);
    if (observed.empty()) continue;
    const auto cands = candidate_sources(net, observed, hidden);
    const std::set<int> hidden_set(hidden.begin(), hidden.end());
    for (int s : cands) {
      CHECK(hidden_set.count(s) == 1);
      const auto reach = reachable_set(net, s);
      for (int o : observed)
        CHECK(std::binary_search(reach.begin(), reach.end(), o));
    }
  }
}

TEST_CASE("generate_kronecker hits the exact edge count") {
  KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 8, 512};
  Rng rng(1);
  const Topology topo = generate_kronecker(spec, rng);
  CHECK(topo.node_count == 256);
  CHECK(topo.edges.size() == 512);
  for (auto [u, v] : topo.edges) CHECK(u != v);
  // sorted unique
  for (std::size_t i = 1; i < topo.edges.size(); ++i)
    CHECK(topo.edges[i - 1] < topo.edges[i]);
}

TEST_CASE("all-zero seed cannot produce edges") {
  KroneckerSpec zero{{0.0, 0.0, 0.0, 0.0}, 4, 0};
  Rng rng(3);
  CHECK(generate_kronecker(zero, rng).edges.empty());
  KroneckerSpec impossible{{0.0, 0.0, 0.0, 0.0}, 4, 5};
  CHECK_THROWS_AS(generate_kronecker(impossible, rng), std::invalid_argument);
}

TEST_CASE("expected raw Bernoulli count is (sum of seed)^power") {
  // sum of entries 2.0, power 8 -> expected 256 edges before trimming
  // (self-loop entries excluded, a ~1% correction at this size)
  KroneckerSpec spec{{0.5, 0.5, 0.5, 0.5}, 8, 256};
  Rng rng(17);
  double total = 0.0;
  const int reps = 60;
  for (int rep = 0; rep < reps; ++rep) {
    Rng one = rng.stream(rep);
    total += static_cast<double>(sample_kronecker(spec, one).edges.size());
  }
  const double mean = total / reps;
  // diagonal removes 256 * (1/2)^8 = 1 expected edge; Monte Carlo sigma ~ 2
  CHECK(mean == doctest::Approx(255.0).epsilon(0.03));
}

TEST_CASE("kronecker spec validation") {
  Rng rng(1);
  KroneckerSpec bad{{0.5, 0.5, 0.5, 1.5}, 3, 4};
  CHECK_THROWS_AS(generate_kronecker(bad, rng), std::invalid_argument);
  KroneckerSpec too_many{{1.0, 1.0, 1.0, 1.0}, 2, 13};
  CHECK_THROWS_AS(generate_kronecker(too_many, rng), std::invalid_argument);
}

TEST_CASE("assign_rates draws inside the interval") {
  KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 8, 512};
  Rng rng(5);
  const Topology topo = generate_kronecker(spec, rng);

  SUBCASE("degenerate interval") {
    Rng r(1);
    const Network net = assign_rates(topo, 3.0, 3.0, 1.0, r);
    for (const Edge& e : net.edges()) CHECK(e.alpha == 3.0);
  }
  SUBCASE("support and mean") {
    Rng r(2);
    const Network net = assign_rates(topo, 5.0, 10.0, 1.0, r);
    double sum = 0.0;
    for (const Edge& e : net.edges()) {
      CHECK(e.alpha >= 5.0);
      CHECK(e.alpha <= 10.0);
      sum += e.alpha;
    }
    const double mean = sum / net.edge_count();
    CHECK(mean > 7.0);
    CHECK(mean < 8.0);
  }
  SUBCASE("unit interval support") {
    Rng r(3);
    const Network net = assign_rates(topo, 1.0, 2.0, 1.0, r);
    for (const Edge& e : net.edges()) {
      CHECK(e.alpha >= 1.0);
      CHECK(e.alpha <= 2.0);
    }
  }
  SUBCASE("bad bounds") {
    Rng r(4);
    CHECK_THROWS_AS(assign_rates(topo, 0.0, 1.0, 1.0, r), std::invalid_argument);
    CHECK_THROWS_AS(assign_rates(topo, 2.0, 1.0, 1.0, r), std::invalid_argument);
  }
}
