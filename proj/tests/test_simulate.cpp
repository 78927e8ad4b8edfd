#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sleuth/graph.hpp"
#include "sleuth/simulate.hpp"

using namespace sleuth;

TEST_CASE("shortest_path_times on small graphs") {
  SUBCASE("single path") {
    const Network chain(3, {{0, 1, 1.0}, {1, 2, 1.0}}, 1.0);
    const std::vector<double> w{1.0, 2.0};
    const auto t = shortest_path_times(chain, w, 0);
    CHECK(t == std::vector<double>{0.0, 1.0, 3.0});
  }
  SUBCASE("two-path minimum") {
    const Network diamond(
        4, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}}, 1.0);
    // edges sorted by (src, dst): (0,1) (0,2) (1,3) (2,3)
    const std::vector<double> w{2.0, 3.0, 4.0, 1.0};
    const auto t = shortest_path_times(diamond, w, 0);
    CHECK(t[3] == doctest::Approx(4.0));
  }
  SUBCASE("disconnected node is never reached") {
    const Network net(3, {{0, 1, 1.0}}, 1.0);
    const auto t = shortest_path_times(net, std::vector<double>{1.0}, 0);
    CHECK(std::isinf(t[2]));
  }
  SUBCASE("negative edge time rejected") {
    const Network net(2, {{0, 1, 1.0}}, 1.0);
    CHECK_THROWS_AS(shortest_path_times(net, std::vector<double>{-1.0}, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("shortest paths satisfy the true-parent property") {
  KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 6, 160};
  Rng rng(21);
  const Topology topo = generate_kronecker(spec, rng);
  const Network net = assign_rates(topo, 1.0, 3.0, 1.0, rng);
  const SampleBank bank(net, 10, rng.stream(1));
  for (int l = 0; l < 10; ++l) {
    const auto t = shortest_path_times(net, bank.edge_times(l), 0);
    for (int i = 0; i < net.node_count(); ++i) {
      if (i == 0 || std::isinf(t[i])) continue;
      bool has_tight_parent = false;
      for (const auto& arc : net.in_arcs(i)) {
        if (std::isinf(t[arc.src])) continue;
        const double via = t[arc.src] + bank.edge_times(l)[arc.edge_id];
        CHECK(t[i] <= via + 1e-12);
        if (std::fabs(via - t[i]) < 1e-9) has_tight_parent = true;
      }
      CHECK(has_tight_parent);
    }
  }
}

TEST_CASE("simulate_cascade basics") {
  SUBCASE("isolated source") {
    const Network net(1, {}, 1.0);
    Rng rng(1);
    const Cascade c = simulate_cascade(net, 0, 0.0, 10.0, rng);
    CHECK(c.infected_count() == 1);
    CHECK(c.times[0] == 0.0);
  }
  SUBCASE("vanishing delays infect every reachable node") {
    const Network chain(4, {{0, 1, 1e-9}, {1, 2, 1e-9}, {2, 3, 1e-9}}, 1.0);
    Rng rng(2);
    const Cascade c = simulate_cascade(chain, 0, 0.0, 1.0, rng);
    CHECK(c.infected_count() == 4);
  }
}

TEST_CASE("two-hop time is Gamma(2,1) on the unit chain") {
  const Network chain(3, {{0, 1, 1.0}, {1, 2, 1.0}}, 1.0);
  Rng rng(3);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng one = rng.stream(i);
    const Cascade c = simulate_cascade(chain, 0, 0.0, kInf, one);
    sum += c.times[2];
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("source-time shift moves every infection time by the shift") {
  const Network chain(3, {{0, 1, 2.0}, {1, 2, 2.0}}, 1.0);
  Rng a(7), b(7);
  const Cascade c0 = simulate_cascade(chain, 0, 0.0, 50.0, a);
  const Cascade c5 = simulate_cascade(chain, 0, 5.0, 50.0, b);
  for (int v = 0; v < 3; ++v) {
    if (std::isinf(c0.times[v])) {
      CHECK(std::isinf(c5.times[v]));
    } else {
      CHECK(c5.times[v] == doctest::Approx(c0.times[v] + 5.0));
    }
  }
}

TEST_CASE("mask_cascade keeps the source hidden and the counts right") {
  Cascade cascade;
  cascade.source = 0;
  cascade.window = 100.0;
  cascade.times.assign(11, 0.0);
  for (int v = 1; v < 11; ++v) cascade.times[v] = v;

  SUBCASE("full observation keeps all non-source infected") {
    Rng rng(1);
    const ObservedCascade obs = mask_cascade(cascade, 1.0, rng);
    CHECK(obs.observed.size() == 10);
    CHECK_FALSE(obs.is_observed(0));
  }
  SUBCASE("source never observed across repeated maskings") {
    Rng rng(2);
    for (int rep = 0; rep < 1000; ++rep) {
      Rng one = rng.stream(rep);
      const ObservedCascade obs = mask_cascade(cascade, 0.3, one);
      CHECK_FALSE(obs.is_observed(0));
    }
  }
  SUBCASE("ceiling rule: 10% of 40 non-source infected is 4") {
    Cascade big;
    big.source = 0;
    big.window = 100.0;
    big.times.assign(60, kInf);
    for (int v = 0; v < 41; ++v) big.times[v] = v;  // 41 infected incl. source
    Rng rng(3);
    const ObservedCascade obs = mask_cascade(big, 0.1, rng);
    CHECK(obs.observed.size() == 4);
    // O and H partition the nodes; O holds only finite-time nodes
    CHECK(obs.hidden_nodes().size() + obs.observed.size() == 60);
    for (const auto& [node, time] : obs.observed) {
      (void)node;
      CHECK(std::isfinite(time));
    }
  }
  SUBCASE("too few infected nodes") {
    Cascade tiny;
    tiny.source = 0;
    tiny.window = 10.0;
    tiny.times = {0.0, kInf};
    Rng rng(4);
    CHECK_THROWS_AS(mask_cascade(tiny, 0.5, rng), std::invalid_argument);
  }
}

TEST_CASE("sample bank: offset property and draw reuse") {
  KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 5, 64};
  Rng rng(11);
  const Topology topo = generate_kronecker(spec, rng);
  const Network net = assign_rates(topo, 1.0, 2.0, 1.0, rng);
  const SampleBank bank(net, 25, rng.stream(9));
  const int n = net.node_count();

  // base arrivals are exactly the shortest paths of the stored draws
  const auto base = bank.base_times(0);
  for (int l = 0; l < 25; ++l) {
    const auto spt = shortest_path_times(net, bank.edge_times(l), 0);
    for (int v = 0; v < n; ++v) {
      if (std::isinf(spt[v])) {
        CHECK(std::isinf(base[l * n + v]));
      } else {
        CHECK(base[l * n + v] == spt[v]);
      }
    }
  }

  // the same delay draws serve every candidate source
  const auto first = bank.edge_times(3);
  const auto again = bank.edge_times(3);
  CHECK(std::equal(first.begin(), first.end(), again.begin()));

  // triangle consistency for a second source
  const auto base1 = bank.base_times(1);
  for (int l = 0; l < 25; ++l) {
    for (int id = 0; id < net.edge_count(); ++id) {
      const Edge& e = net.edges()[id];
      const double tj = base1[l * n + e.src];
      const double ti = base1[l * n + e.dst];
      if (std::isfinite(tj)) CHECK(ti <= tj + bank.edge_times(l)[id] + 1e-12);
    }
  }
}

TEST_CASE("bank construction is fast at benchmark scale") {
  KroneckerSpec spec{{0.9, 0.5, 0.5, 0.3}, 8, 512};
  Rng rng(13);
  const Topology topo = generate_kronecker(spec, rng);
  const Network net = assign_rates(topo, 5.0, 10.0, 1.0, rng);
  const auto start = std::chrono::steady_clock::now();
  const SampleBank bank(net, 400, rng.stream(1));
  const auto table = bank.base_times(0);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(table.size() == 400u * 256u);
  CHECK(seconds < 1.0);
}
