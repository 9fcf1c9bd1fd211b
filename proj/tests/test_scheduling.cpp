#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "edgeplan/evaluator.hpp"
#include "edgeplan/rng.hpp"
#include "edgeplan/scheduling.hpp"
#include "edgeplan/trace.hpp"
#include "helpers.hpp"

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

constexpr double kInf = std::numeric_limits<double>::infinity();

int switch_count(const SchedulePlan& plan) {
  int count = 0;
  const std::vector<int>* prev = &plan.initial_state;
  for (const auto& sp : plan.slots) {
    for (std::size_t m = 0; m < sp.servers.size(); ++m)
      count += std::max(0, sp.servers[m] - (*prev)[m]);
    prev = &sp.servers;
  }
  return count;
}

}  // namespace

TEST_CASE("per-slot fractional solve") {
  SUBCASE("single station without caps") {
    auto nbh = explicit_nbh({{0}});
    auto sf = solve_slot_fractional({10.0}, nbh, 10, 2.0, {kInf});
    CHECK(sf.beta_star == doctest::Approx(0.5));
    CHECK(sf.eta_star == doctest::Approx(1.0));
  }
  SUBCASE("station cap forces the remainder elsewhere") {
    auto nbh = explicit_nbh({{0, 1}, {0, 1}});
    auto sf = solve_slot_fractional({8.0, 12.0}, nbh, 20, 1.0, {5.0, kInf});
    CHECK(sf.beta_star == doctest::Approx(1.0));
    CHECK(sf.s[0] <= 5.0 + 1e-9);
    CHECK(sf.s[0] + sf.s[1] == doctest::Approx(20.0));
  }
  SUBCASE("zero demand slot") {
    auto nbh = explicit_nbh({{0}, {1}});
    auto sf = solve_slot_fractional({0.0, 0.0}, nbh, 3, 1.0, {2.0, 2.0});
    CHECK(sf.beta_star == 0.0);
    CHECK(std::isinf(sf.eta_star));
    CHECK(std::accumulate(sf.s.begin(), sf.s.end(), 0.0) == doctest::Approx(3.0));
    for (std::size_t m = 0; m < sf.s.size(); ++m) CHECK(sf.s[m] <= 2.0 + 1e-9);
  }
  SUBCASE("K above the caps is rejected") {
    auto nbh = explicit_nbh({{0}});
    CHECK_THROWS_AS(solve_slot_fractional({5.0}, nbh, 4, 1.0, {3.0}), std::invalid_argument);
  }
}

TEST_CASE("K* search") {
  SUBCASE("all-zero frames need no servers") {
    auto nbh = explicit_nbh({{0}});
    auto ks = find_k_star(0, {{0.0}, {0.0}}, nbh, 1.0, {kInf}, 0.0);
    CHECK(ks.k_star == 0);
    CHECK(ks.satisfied);
  }
  SUBCASE("single frame at exact capacity") {
    auto nbh = explicit_nbh({{0}});
    auto ks = find_k_star(0, {{10.0}}, nbh, 1.0, {kInf}, 0.0);
    CHECK(ks.k_star == 10);
    CHECK(ks.satisfied);
  }
  SUBCASE("tighter epsilon never lowers K*") {
    Rng rng(550);
    Instance inst = testhelp::make_instance(rng, 4, 1);
    std::vector<Vec> frames;
    for (int f = 0; f < 5; ++f) {
      Vec w(4);
      for (auto& v : w) v = 2.0 + 8.0 * rng.next_double();
      frames.push_back(w);
    }
    Vec caps(4, kInf);
    auto loose = find_k_star(0, frames, inst.nbh, 1.0, caps, 0.2);
    auto tight = find_k_star(0, frames, inst.nbh, 1.0, caps, 0.01);
    CHECK(tight.k_star >= loose.k_star);
  }
  SUBCASE("caps can make epsilon unreachable") {
    auto nbh = explicit_nbh({{0}});
    auto ks = find_k_star(0, {{10.0}}, nbh, 1.0, {4.0}, 0.0);
    CHECK(ks.k_star == 4);
    CHECK_FALSE(ks.satisfied);
  }
}

TEST_CASE("schedule cost accounting") {
  SchedulePlan plan;
  plan.initial_state = {0};
  plan.slots = {{0, 0, 0, 0, {3}}, {1, 0, 0, 0, {1}}};
  CostParams costs;
  costs.E_r = 1.0;
  costs.E_s = 2.0;
  auto c = schedule_cost(plan, costs);
  CHECK(c.running == doctest::Approx(4.0));    // 3 + 1 servers on
  CHECK(c.switching == doctest::Approx(6.0));  // only the 0 -> 3 up-transition
  CHECK(c.total == doctest::Approx(10.0));

  SUBCASE("constant plan has zero switching") {
    SchedulePlan flat;
    flat.initial_state = {2, 1};
    flat.slots = {{0, 0, 0, 0, {2, 1}}, {1, 0, 0, 0, {2, 1}}};
    auto cf = schedule_cost(flat, costs);
    CHECK(cf.switching == 0.0);
  }
}

TEST_CASE("day schedule joint solve") {
  auto nbh = explicit_nbh({{0, 1}, {0, 1}});
  Vec caps = {6.0, 6.0};
  CostParams costs;
  costs.E_r = 1.0;
  costs.E_s = 1.0;
  costs.C = 2.0;

  auto make_inputs = [&](std::vector<Vec> demand) {
    std::vector<DaySlotInput> inputs;
    for (auto& w : demand) {
      DaySlotInput in;
      in.w_bar = w;
      double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (total > 0) {
        in.k_star = static_cast<int>(std::ceil(total / costs.C));
        auto sf = solve_slot_fractional(w, nbh, in.k_star, costs.C, caps);
        in.beta_star = sf.beta_star;
        in.eta_star = sf.eta_star;
      } else {
        in.k_star = 0;
        in.beta_star = 0.0;
        in.eta_star = kInf;
      }
      inputs.push_back(std::move(in));
    }
    return inputs;
  };

  SUBCASE("constant demand with a matching initial state never switches") {
    auto inputs = make_inputs({{4.0, 4.0}, {4.0, 4.0}, {4.0, 4.0}});
    SchedulePlan probe = solve_day_schedule(inputs, nbh, caps, costs, {0, 0});
    SchedulePlan plan = solve_day_schedule(inputs, nbh, caps, costs, probe.slots[0].servers);
    CHECK(plan.cost.switching == 0.0);
    CHECK(plan.cost.running == doctest::Approx(costs.E_r * 3 * 4));
    for (const auto& sp : plan.slots) {
      int total = std::accumulate(sp.servers.begin(), sp.servers.end(), 0);
      CHECK(total >= sp.k_star);
    }
  }
  SUBCASE("zero switching cost decouples the slots") {
    auto inputs = make_inputs({{2.0, 2.0}, {8.0, 4.0}, {1.0, 0.0}});
    CostParams free_switch = costs;
    free_switch.E_s = 0.0;
    SchedulePlan plan = solve_day_schedule(inputs, nbh, caps, free_switch, {0, 0});
    // Every slot independently reaches its own minimum total K*.
    for (const auto& sp : plan.slots) {
      int total = std::accumulate(sp.servers.begin(), sp.servers.end(), 0);
      CHECK(total == sp.k_star);
    }
  }
  SUBCASE("large switching cost holds the peak set through a dip") {
    std::vector<Vec> demand = {{8.0, 4.0}, {1.0, 0.0}, {8.0, 4.0}};
    auto inputs = make_inputs(demand);
    CostParams expensive = costs;
    expensive.E_s = 100.0;
    SchedulePlan plan = solve_day_schedule(inputs, nbh, caps, expensive, {4, 2});
    // Holding the six peak servers costs 6*E_r in the dip, far below one
    // re-switch at E_s=100; enumerating two-slot alternatives confirms it.
    for (const auto& sp : plan.slots) {
      int total = std::accumulate(sp.servers.begin(), sp.servers.end(), 0);
      CHECK(total == 6);
    }
    CHECK(plan.cost.switching == 0.0);

    CostParams cheap = costs;
    cheap.E_s = 0.0;
    SchedulePlan churn = solve_day_schedule(inputs, nbh, caps, cheap, {4, 2});
    CHECK(switch_count(plan) <= switch_count(churn));
  }
  SUBCASE("infeasible guarantees name the slot") {
    std::vector<DaySlotInput> inputs(1);
    inputs[0].w_bar = {4.0, 4.0};
    inputs[0].k_star = 20;  // beyond the caps
    inputs[0].beta_star = 1.0;
    inputs[0].eta_star = 1.0;
    CHECK_THROWS_WITH_AS(solve_day_schedule(inputs, nbh, caps, costs, {0, 0}),
                         doctest::Contains("slot 0"), std::runtime_error);
  }
}

TEST_CASE("switching monotonicity on random diurnal instances") {
  Rng rng(660);
  for (int it = 0; it < 5; ++it) {
    Instance inst = testhelp::make_instance(rng, 4, 1);
    const int M = inst.nbh.size();
    Vec caps(M, 8.0);
    CostParams costs;
    costs.E_r = 1.0;
    costs.E_s = 1.0;
    costs.C = 2.0;
    std::vector<DaySlotInput> inputs;
    for (int t = 0; t < 6; ++t) {
      DaySlotInput in;
      in.w_bar.assign(M, 0.0);
      double level = (t % 2 == 0) ? 1.0 : 3.0;  // oscillating demand
      for (int m = 0; m < M; ++m) in.w_bar[m] = level * (0.5 + rng.next_double());
      double total = std::accumulate(in.w_bar.begin(), in.w_bar.end(), 0.0);
      in.k_star = static_cast<int>(std::ceil(total / costs.C)) + 1;
      auto sf = solve_slot_fractional(in.w_bar, inst.nbh, in.k_star, costs.C, caps);
      in.beta_star = sf.beta_star;
      in.eta_star = sf.eta_star;
      inputs.push_back(std::move(in));
    }
    std::vector<int> initial(M, 0);
    SchedulePlan with_sc = solve_day_schedule(inputs, inst.nbh, caps, costs, initial);
    CostParams no_sc = costs;
    no_sc.E_s = 0.0;
    SchedulePlan without_sc = solve_day_schedule(inputs, inst.nbh, caps, no_sc, initial);
    // The fractional plans satisfy this without slack (the E_s > 0 objective
    // dominates); per-slot rounding can shift either count by up to one unit
    // per station.
    CHECK(switch_count(with_sc) <= switch_count(without_sc) + M);
    // With E_s = 0 the joint objective must equal the per-slot running total.
    double per_slot_running = 0.0;
    for (const auto& sp : without_sc.slots)
      per_slot_running += costs.E_r * std::accumulate(sp.servers.begin(), sp.servers.end(), 0);
    CHECK(without_sc.cost.running == doctest::Approx(per_slot_running));
  }
}

TEST_CASE("day history grouping") {
  TraceSeries series;
  series.slot_length = 43200;  // two slots per day
  // Monday 2023-05-01 (workday) and Saturday 2023-05-06 (holiday class).
  auto at = [](const char* iso) { return parse_iso_timestamp(iso); };
  series.frames = {{0, at("2023-05-01T00:00:00"), {2.0}},
                   {1, at("2023-05-01T12:00:00"), {4.0}},
                   {10, at("2023-05-06T00:00:00"), {8.0}},
                   {11, at("2023-05-06T12:00:00"), {16.0}}};
  CalendarRule rule;
  for (const auto& fr : series.frames)
    series.labels.push_back(label_for(fr.timestamp, series.slot_length, rule));

  auto work = day_history(series, 2, DayClass::Workday);
  CHECK(work.w_bar[0] == Vec{2.0});
  CHECK(work.w_bar[1] == Vec{4.0});
  auto holi = day_history(series, 2, DayClass::Holiday);
  CHECK(holi.w_bar[0] == Vec{8.0});
  CHECK(holi.w_bar[1] == Vec{16.0});

  CHECK_THROWS_AS(day_history(series, 5, DayClass::Workday), std::invalid_argument);
}
