#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "edgeplan/flow.hpp"
#include "edgeplan/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace edgeplan;
using testhelp::Instance;

namespace {

Neighborhood explicit_nbh(std::vector<std::vector<int>> omega) {
  Neighborhood nbh;
  nbh.omega = std::move(omega);
  nbh.rule = ExplicitRule{};
  nbh.validate();
  return nbh;
}

// Exhaustive minimum over integral circulations, by assigning every arc a
// value in its bounds and checking conservation. Test graphs stay tiny.
std::optional<double> brute_force_circulation(const FlowGraph& g) {
  std::optional<double> best;
  std::vector<std::int64_t> flow(g.arcs.size());
  std::vector<std::int64_t> balance(g.node_count(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double cost) {
    if (i == g.arcs.size()) {
      for (std::int64_t b : balance)
        if (b != 0) return;
      if (!best || cost < *best - 1e-12) best = cost;
      return;
    }
    const auto& a = g.arcs[i];
    for (std::int64_t f = a.lower; f <= a.upper; ++f) {
      balance[a.tail] -= f;
      balance[a.head] += f;
      rec(i + 1, cost + a.cost * static_cast<double>(f));
      balance[a.tail] += f;
      balance[a.head] -= f;
    }
  };
  rec(0, 0.0);
  return best;
}

void check_conservation(const FlowGraph& g, const IntegralFlow& flow) {
  std::vector<std::int64_t> balance(g.node_count(), 0);
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    CHECK(flow.flow[i] >= g.arcs[i].lower);
    CHECK(flow.flow[i] <= g.arcs[i].upper);
    balance[g.arcs[i].tail] -= flow.flow[i];
    balance[g.arcs[i].head] += flow.flow[i];
  }
  for (std::int64_t b : balance) CHECK(b == 0);
}

}  // namespace

TEST_CASE("graph construction bounds and costs") {
  auto nbh = explicit_nbh({{0}, {1}});
  SUBCASE("integral inputs give tight bounds") {
    Vec s = {3.0, 2.0};
    Matrix u = {{3.0, 0.0}, {0.0, 2.0}};
    Vec w = {6.0, 4.0};
    auto g = build_circulation_graph(s, u, 0.5, w, 5, nbh);
    for (const auto& a : g.arcs) CHECK(a.lower == a.upper);
    auto flow = min_cost_circulation(g);
    check_conservation(g, flow);
    CHECK(flow.flow[g.sink_arc_of_station[0]] == 3);
    CHECK(flow.flow[g.sink_arc_of_station[1]] == 2);
  }
  SUBCASE("fractional station capacity carries the rounding-loss cost") {
    Vec s = {2.5, 2.5};
    Matrix u = {{2.5, 0.0}, {0.0, 2.5}};
    Vec w = {5.0, 5.0};
    auto g = build_circulation_graph(s, u, 0.5, w, 5, nbh);
    const auto& sink0 = g.arcs[g.sink_arc_of_station[0]];
    CHECK(sink0.lower == 2);
    CHECK(sink0.upper == 3);
    CHECK(sink0.cost == doctest::Approx(0.8));  // floor(2.5)/2.5
  }
  SUBCASE("zero capacity pins the sink arc to zero") {
    Vec s = {5.0, 0.0};
    Matrix u = {{5.0, 0.0}, {0.0, 0.0}};
    Vec w = {10.0, 0.0};
    auto g = build_circulation_graph(s, u, 0.5, w, 5, nbh);
    const auto& sink1 = g.arcs[g.sink_arc_of_station[1]];
    CHECK(sink1.lower == 0);
    CHECK(sink1.upper == 0);
    CHECK(sink1.cost == 0.0);
  }
  SUBCASE("violated conservation is rejected") {
    Vec s = {3.0, 2.0};
    Matrix u = {{1.0, 0.0}, {0.0, 2.0}};  // column 0 sums to 1, not 3
    Vec w = {2.0, 4.0};
    CHECK_THROWS_AS(build_circulation_graph(s, u, 0.5, w, 5, nbh), FlowError);
  }
}

TEST_CASE("min cost circulation picks the cheaper round-up") {
  // Two stations at 1.5 fractional servers; the bounds allow [1,2] each with
  // K=3 forcing one round-up. Costs differ, so the cheaper station takes it.
  FlowGraph g;
  g.station_count = 2;
  g.K = 3;
  g.arcs = {
      {g.source(), g.left(0), 1, 2, 0.0},
      {g.source(), g.left(1), 1, 2, 0.0},
      {g.left(0), g.right(0), 1, 2, 0.0},
      {g.left(1), g.right(1), 1, 2, 0.0},
      {g.right(0), g.sink(), 1, 2, 0.5},
      {g.right(1), g.sink(), 1, 2, 0.9},
      {g.sink(), g.source(), 3, 3, 0.0},
  };
  g.sink_arc_of_station = {4, 5};
  auto flow = min_cost_circulation(g);
  check_conservation(g, flow);
  CHECK(flow.flow[4] == 2);  // cheaper arc takes the extra unit
  CHECK(flow.flow[5] == 1);
  auto expect = brute_force_circulation(g);
  REQUIRE(expect.has_value());
  CHECK(flow.total_cost == doctest::Approx(*expect));
}

TEST_CASE("infeasible bounds raise a cut witness") {
  FlowGraph g;
  g.station_count = 1;
  g.K = 5;
  g.arcs = {
      {g.source(), g.left(0), 0, 1, 0.0},
      {g.left(0), g.right(0), 0, 1, 0.0},
      {g.right(0), g.sink(), 0, 1, 0.0},
      {g.sink(), g.source(), 5, 5, 0.0},  // demands 5 through a width-1 path
  };
  g.sink_arc_of_station = {2};
  CHECK_THROWS_WITH_AS(min_cost_circulation(g), doctest::Contains("cut"), FlowError);
}

TEST_CASE("random small circulations match exhaustive search") {
  Rng rng(4242);
  int solved = 0;
  for (int it = 0; it < 60; ++it) {
    // Random circulation graphs on 4 nodes with a handful of arcs.
    int n = 3 + static_cast<int>(rng.next_index(2));
    FlowGraph g;
    g.station_count = (n - 2 + 1) / 2;  // node ids only need to stay in range
    g.K = 0;
    int arcs = 5 + static_cast<int>(rng.next_index(4));
    for (int a = 0; a < arcs; ++a) {
      int u = static_cast<int>(rng.next_index(n));
      int v = static_cast<int>(rng.next_index(n));
      if (u == v) continue;
      std::int64_t lo = static_cast<std::int64_t>(rng.next_index(2));
      std::int64_t up = lo + static_cast<std::int64_t>(rng.next_index(3));
      double cost = rng.next_double();
      g.arcs.push_back({u, v, lo, up, cost});
    }
    if (g.arcs.empty()) continue;
    auto expect = brute_force_circulation(g);
    if (!expect) {
      CHECK_THROWS_AS(min_cost_circulation(g), FlowError);
    } else {
      auto flow = min_cost_circulation(g);
      check_conservation(g, flow);
      CHECK(flow.total_cost == doctest::Approx(*expect).epsilon(1e-9));
      ++solved;
    }
  }
  CHECK(solved > 10);
}

TEST_CASE("mincost rounding") {
  SUBCASE("integral fractional solution is returned unchanged") {
    auto nbh = explicit_nbh({{0}, {1}});
    RepresentativeSet reps;
    reps.vectors.push_back({6.0, 4.0});
    reps.group_keys.push_back({});
    auto frac = solve_ro_fractional(reps, nbh, {5, 2.0});
    auto rounded = round_mincost(frac, 5, nbh);
    CHECK(rounded.s == std::vector<int>{3, 2});
    CHECK(rounded.provenance == "mincost");
  }
  SUBCASE("symmetric half split stays in bounds and sums to K") {
    // Hand-built symmetric fractional point: s = [1.5, 1.5], uniform routing.
    auto nbh = explicit_nbh({{0, 1}, {0, 1}});
    FractionalPlacement frac;
    frac.s_tilde = {1.5, 1.5};
    frac.kappa = 0.5;
    frac.u_prime = {{{0.75, 0.75}, {0.75, 0.75}}};
    auto rounded = round_mincost(frac, 0, 3, nbh);
    CHECK(rounded.total() == 3);
    for (int v : rounded.s) {
      CHECK(v >= 1);
      CHECK(v <= 2);
    }
    auto again = round_mincost(frac, 0, 3, nbh);
    CHECK(rounded.s == again.s);  // deterministic tie-break
  }
  SUBCASE("rounded placements respect the fractional box on random instances") {
    Rng rng(717);
    for (int it = 0; it < 20; ++it) {
      Instance inst = testhelp::make_instance(rng, 3 + rng.next_int(0, 3), 1 + rng.next_int(0, 2));
      int K = 4 + rng.next_int(0, 10);
      RoRpSolver solver(inst.reps, inst.nbh, 1.5);
      auto ro = solver.solve_ro(K);
      auto rounded = round_mincost(ro, K, inst.nbh);
      CHECK(rounded.total() == K);
      for (std::size_t m = 0; m < rounded.s.size(); ++m) {
        CHECK(rounded.s[m] >= static_cast<int>(std::floor(ro.s_tilde[m] + 1e-9)));
        CHECK(rounded.s[m] <= static_cast<int>(std::ceil(ro.s_tilde[m] - 1e-9)));
      }
      // The pooling solution rounds through the same machinery.
      auto rp = solver.solve_rp(K, ro.beta_star);
      auto rp_rounded = round_mincost(rp, K, inst.nbh);
      CHECK(rp_rounded.total() == K);
      for (std::size_t m = 0; m < rp_rounded.s.size(); ++m) {
        CHECK(rp_rounded.s[m] >= static_cast<int>(std::floor(rp.s_tilde[m] + 1e-9)));
        CHECK(rp_rounded.s[m] <= static_cast<int>(std::ceil(rp.s_tilde[m] - 1e-9)));
      }
    }
  }
  SUBCASE("close to optimal against brute force on tiny instances") {
    Rng rng(31);
    for (int it = 0; it < 8; ++it) {
      Instance inst = testhelp::make_instance(rng, 3 + rng.next_int(0, 1), 1 + rng.next_int(0, 1));
      const int M = inst.nbh.size();
      int K = 3 + rng.next_int(0, 3);
      double C = 1.0;
      auto ro = solve_ro_fractional(inst.reps, inst.nbh, {K, C});
      auto rounded = round_mincost(ro, K, inst.nbh);
      double beta_rounded = testhelp::beta_of_placement(rounded.s, inst.reps, inst.nbh, C);
      double best = std::numeric_limits<double>::infinity();
      oracle::for_each_integer_split(M, K, [&](const std::vector<int>& s) {
        for (int m = 0; m < M; ++m) {
          if (s[m] < static_cast<int>(std::floor(ro.s_tilde[m] + 1e-9))) return;
          if (s[m] > static_cast<int>(std::ceil(ro.s_tilde[m] - 1e-9))) return;
        }
        best = std::min(best, testhelp::beta_of_placement(s, inst.reps, inst.nbh, C));
      });
      CHECK(beta_rounded <= best + 1e-6);
    }
  }
}

TEST_CASE("dimacs dump") {
  auto nbh = explicit_nbh({{0}});
  Vec s = {2.0};
  Matrix u = {{2.0}};
  Vec w = {4.0};
  auto g = build_circulation_graph(s, u, 0.5, w, 2, nbh);
  std::ostringstream os;
  write_dimacs(g, os);
  auto text = os.str();
  CHECK(text.find("p min 4 4") != std::string::npos);
  CHECK(text.find("a 4 1 2 2 0") != std::string::npos);  // feedback arc K=2
}
