#pragma once

#include <cstdint>
#include <vector>

#include "edgeplan/placement.hpp"
#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace edgeplan {

struct CostParams {
  double E_r = 1.0;  // idle-running cost per server per slot
  double E_w = 0.0;  // energy cost per workload unit (recorded, not optimized)
  double E_s = 1.0;  // switching cost per on-transition
  double C = 1.0;    // server capacity
};

struct ScheduleCost {
  double running = 0.0;
  double switching = 0.0;
  double total = 0.0;
};

struct SlotPlan {
  int t = 0;
  int k_star = 0;
  double beta_star = 0.0;
  double eta_star = 0.0;
  std::vector<int> servers;
};

struct SchedulePlan {
  std::vector<SlotPlan> slots;
  std::vector<int> initial_state;
  ScheduleCost cost;
  double lp_objective = 0.0;  // fractional optimum before rounding
};

// Fractional per-slot solve: the placement machinery with a single workload
// vector plus per-station active-server caps.
struct SlotFractional {
  double beta_star = 0.0;
  double eta_star = 0.0;  // +inf when the slot carries no demand
  Vec s;
  FractionalPlacement frac;
};

SlotFractional solve_slot_fractional(const Vec& w_bar, const Neighborhood& nbh, int K_t, double C,
                                     const Vec& s_cap);

struct KStarResult {
  int k_star = 0;
  bool satisfied = true;  // false when even the largest K misses epsilon
};

// Smallest K whose rounded per-slot placement keeps the mean rejection rate
// over the historical frames at or below epsilon (binary search).
KStarResult find_k_star(int slot_id, const std::vector<Vec>& history_frames,
                        const Neighborhood& nbh, double C, const Vec& s_cap, double epsilon);

struct DaySlotInput {
  Vec w_bar;
  int k_star = 0;
  double beta_star = 0.0;
  double eta_star = 0.0;
};

// Joint LP over all slots minimizing running plus switching cost, then
// per-slot rounding. initial_state is yesterday's final state.
SchedulePlan solve_day_schedule(const std::vector<DaySlotInput>& slots, const Neighborhood& nbh,
                                const Vec& s_cap, const CostParams& costs,
                                const std::vector<int>& initial_state);

// Fractional minimum running cost of one slot in isolation (the joint LP with
// the switching terms dropped decomposes into these).
double min_running_cost(const DaySlotInput& slot, const Neighborhood& nbh, const Vec& s_cap,
                        const CostParams& costs);

ScheduleCost schedule_cost(const SchedulePlan& plan, const CostParams& costs);

// Historical inputs for one planning day: per-slot mean workload over frames
// whose day class matches, plus those frames for the K* fit.
struct DayHistory {
  std::vector<Vec> w_bar;                   // per slot-of-day
  std::vector<std::vector<Vec>> frames;     // per slot-of-day
};

DayHistory day_history(const TraceSeries& series, int slots_per_day, DayClass day_class);

}  // namespace edgeplan
