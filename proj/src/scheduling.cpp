#include "edgeplan/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgeplan/evaluator.hpp"
#include "edgeplan/lp.hpp"

namespace edgeplan {

namespace {

double total_of(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

RepresentativeSet single_pattern(const Vec& w_bar) {
  RepresentativeSet reps;
  reps.mode = RepresentativeMode::Average;
  reps.vectors.push_back(w_bar);
  reps.group_keys.push_back(GroupKey{});
  return reps;
}

// Deterministic feasible fill for slots with no demand: any placement within
// the caps summing to K works.
Vec greedy_fill(int K, const Vec& s_cap) {
  Vec s(s_cap.size(), 0.0);
  double left = K;
  for (std::size_t m = 0; m < s_cap.size() && left > 0; ++m) {
    double take = std::min(left, s_cap[m]);
    s[m] = take;
    left -= take;
  }
  if (left > 1e-9) throw std::invalid_argument("K exceeds the total station caps");
  return s;
}

}  // namespace

SlotFractional solve_slot_fractional(const Vec& w_bar, const Neighborhood& nbh, int K_t, double C,
                                     const Vec& s_cap) {
  const int M = nbh.size();
  if (static_cast<int>(w_bar.size()) != M || static_cast<int>(s_cap.size()) != M)
    throw std::invalid_argument("vector lengths do not match station count");
  double cap_total = total_of(s_cap);
  if (static_cast<double>(K_t) > cap_total + 1e-9)
    throw std::invalid_argument("K_t exceeds the total station caps");

  SlotFractional out;
  if (total_of(w_bar) <= 0.0) {
    out.beta_star = 0.0;
    out.eta_star = std::numeric_limits<double>::infinity();
    out.s = greedy_fill(K_t, s_cap);
    out.frac.s_tilde = out.s;
    return out;
  }
  if (K_t < 1)
    throw std::invalid_argument("K_t must be positive when the slot carries demand");

  RoRpSolver solver(single_pattern(w_bar), nbh, C, s_cap);
  FractionalPlacement ro = solver.solve_ro(K_t);
  FractionalPlacement rp = solver.solve_rp(K_t, ro.beta_star);
  out.beta_star = ro.beta_star;
  out.eta_star = rp.eta_star;
  out.s = rp.s_tilde;
  out.frac = std::move(rp);
  return out;
}

KStarResult find_k_star(int slot_id, const std::vector<Vec>& history_frames,
                        const Neighborhood& nbh, double C, const Vec& s_cap, double epsilon) {
  (void)slot_id;
  if (history_frames.empty()) throw std::invalid_argument("historical frame set is empty");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in [0, 1)");
  const int M = nbh.size();

  Vec w_bar(M, 0.0);
  Vec peak(M, 0.0);
  for (const auto& f : history_frames) {
    if (static_cast<int>(f.size()) != M)
      throw std::invalid_argument("frame length does not match station count");
    for (int m = 0; m < M; ++m) {
      w_bar[m] += f[m];
      peak[m] = std::max(peak[m], f[m]);
    }
  }
  for (double& v : w_bar) v /= static_cast<double>(history_frames.size());
  if (total_of(w_bar) <= 0.0) return {0, true};

  double cap_total = total_of(s_cap);
  int hi;
  if (std::isfinite(cap_total)) {
    hi = static_cast<int>(std::floor(cap_total + 1e-9));
  } else {
    // Self-serve bound: enough capacity at every station for its own peak.
    double sum = 0.0;
    for (int m = 0; m < M; ++m) sum += std::ceil(peak[m] / C);
    hi = static_cast<int>(sum);
  }
  hi = std::max(hi, 1);

  RoRpSolver solver(single_pattern(w_bar), nbh, C, s_cap);
  RejectionEvaluator eval(nbh, C);
  auto mean_rate_ok = [&](int K) {
    Vec s;
    if (K == 0) {
      s.assign(M, 0.0);
    } else {
      FractionalPlacement ro = solver.solve_ro(K);
      FractionalPlacement rp = solver.solve_rp(K, ro.beta_star);
      IntegerPlacement ip = round_heuristic(rp, RoundingScheme::SRPF, nbh, K, 0);
      s.assign(ip.s.begin(), ip.s.end());
    }
    double rate_sum = 0.0;
    for (const auto& f : history_frames) {
      double total = total_of(f);
      if (total <= 0.0) continue;
      rate_sum += eval.rejected(f, s) / total;
    }
    return rate_sum / static_cast<double>(history_frames.size()) <= epsilon;
  };

  if (!mean_rate_ok(hi)) return {hi, false};
  int lo = 0;  // K = 0 rejects everything while demand is positive
  while (lo + 1 < hi) {
    int mid = lo + (hi - lo) / 2;
    if (mean_rate_ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, true};
}

// ---------------------------------------------------------------------------
// Day-ahead joint schedule
// ---------------------------------------------------------------------------

namespace {

struct DayModel {
  lp::LinearModel model;
  std::vector<std::vector<int>> s;  // [t][m]
  std::vector<std::vector<int>> d;
};

DayModel build_day_model(const std::vector<DaySlotInput>& slots, const Neighborhood& nbh,
                         const Vec& s_cap, const CostParams& costs,
                         const std::vector<int>& initial_state, int only_slot) {
  const int M = nbh.size();
  const int T = static_cast<int>(slots.size());
  DayModel dm;
  auto& model = dm.model;
  dm.s.assign(T, std::vector<int>(M, -1));
  dm.d.assign(T, std::vector<int>(M, -1));

  lp::Terms obj;
  for (int t = 0; t < T; ++t) {
    if (only_slot >= 0 && t != only_slot) continue;
    for (int m = 0; m < M; ++m) {
      dm.s[t][m] = model.add_var("s_" + std::to_string(t) + "_" + std::to_string(m), 0.0, s_cap[m]);
      obj.push_back({dm.s[t][m], costs.E_r});
    }
    if (only_slot < 0) {
      for (int m = 0; m < M; ++m) {
        dm.d[t][m] = model.add_var("d_" + std::to_string(t) + "_" + std::to_string(m));
        obj.push_back({dm.d[t][m], costs.E_s});
      }
    }
  }
  for (int t = 0; t < T; ++t) {
    if (only_slot >= 0 && t != only_slot) continue;
    const auto& in = slots[t];
    bool has_demand = total_of(in.w_bar) > 0.0;
    if (has_demand && !(in.beta_star > 0.0))
      throw std::invalid_argument("slot " + std::to_string(t) +
                                  " carries demand but has beta_star = 0");
    std::vector<lp::Terms> cap_terms(M);
    if (has_demand) {
      for (int m = 0; m < M; ++m) {
        if (in.w_bar[m] <= 0.0) continue;
        lp::Terms ts;
        for (int n : nbh.omega[m]) {
          int var = model.add_var("v_" + std::to_string(t) + "_" + std::to_string(m) + "_" +
                                  std::to_string(n));
          ts.push_back({var, 1.0});
          cap_terms[n].push_back({var, 1.0});
        }
        model.add_constraint(std::move(ts), lp::Rel::Eq, in.w_bar[m]);
      }
      for (int n = 0; n < M; ++n) {
        if (cap_terms[n].empty()) continue;
        cap_terms[n].push_back({dm.s[t][n], -costs.C * in.beta_star});
        model.add_constraint(cap_terms[n], lp::Rel::LessEq, 0.0);
      }
      if (std::isfinite(in.eta_star)) {
        for (int m = 0; m < M; ++m) {
          if (in.w_bar[m] <= 0.0) continue;
          lp::Terms ts;
          for (int n : nbh.omega[m]) ts.push_back({dm.s[t][n], -1.0});
          model.add_constraint(std::move(ts), lp::Rel::LessEq, -in.eta_star * in.w_bar[m]);
        }
      }
    }
    lp::Terms total;
    for (int m = 0; m < M; ++m) total.push_back({dm.s[t][m], 1.0});
    model.add_constraint(std::move(total), lp::Rel::GreaterEq, static_cast<double>(in.k_star));
    if (only_slot < 0) {
      for (int m = 0; m < M; ++m) {
        lp::Terms ts{{dm.s[t][m], 1.0}, {dm.d[t][m], -1.0}};
        double rhs = 0.0;
        if (t == 0) {
          rhs = static_cast<double>(initial_state[m]);
        } else {
          ts.push_back({dm.s[t - 1][m], -1.0});
        }
        model.add_constraint(std::move(ts), lp::Rel::LessEq, rhs);
      }
    }
  }
  model.set_objective(lp::Sense::Minimize, obj);
  return dm;
}

}  // namespace

SchedulePlan solve_day_schedule(const std::vector<DaySlotInput>& slots, const Neighborhood& nbh,
                                const Vec& s_cap, const CostParams& costs,
                                const std::vector<int>& initial_state) {
  const int M = nbh.size();
  const int T = static_cast<int>(slots.size());
  if (T == 0) throw std::invalid_argument("no slots to schedule");
  if (static_cast<int>(s_cap.size()) != M || static_cast<int>(initial_state.size()) != M)
    throw std::invalid_argument("vector lengths do not match station count");
  for (int m = 0; m < M; ++m)
    if (initial_state[m] > s_cap[m] + 1e-9)
      throw std::invalid_argument("initial state exceeds the station caps");
  for (const auto& in : slots)
    if (static_cast<int>(in.w_bar.size()) != M)
      throw std::invalid_argument("slot workload length does not match station count");

  DayModel dm = build_day_model(slots, nbh, s_cap, costs, initial_state, -1);
  auto sol = lp::solve_lp(dm.model);
  if (!sol.optimal()) {
    for (int t = 0; t < T; ++t) {
      DayModel one = build_day_model(slots, nbh, s_cap, costs, initial_state, t);
      if (!lp::solve_lp(one.model).optimal())
        throw std::runtime_error("day schedule infeasible at slot " + std::to_string(t) +
                                 " for the given beta/eta guarantees");
    }
    throw std::runtime_error("day schedule LP failed to solve");
  }

  SchedulePlan plan;
  plan.initial_state = initial_state;
  plan.lp_objective = sol.objective_value;
  plan.slots.resize(T);
  for (int t = 0; t < T; ++t) {
    Vec st(M, 0.0);
    for (int m = 0; m < M; ++m) st[m] = sol.values[dm.s[t][m]];
    int target = static_cast<int>(std::ceil(total_of(st) - 1e-9));
    target = std::max(target, slots[t].k_star);
    IntegerPlacement rounded = round_up_to_target(st, RoundingScheme::SRPF, nbh, target, 0);
    auto& sp = plan.slots[t];
    sp.t = t;
    sp.k_star = slots[t].k_star;
    sp.beta_star = slots[t].beta_star;
    sp.eta_star = slots[t].eta_star;
    sp.servers = std::move(rounded.s);
  }
  plan.cost = schedule_cost(plan, costs);
  return plan;
}

double min_running_cost(const DaySlotInput& slot, const Neighborhood& nbh, const Vec& s_cap,
                        const CostParams& costs) {
  DayModel one = build_day_model({slot}, nbh, s_cap, costs, std::vector<int>(nbh.size(), 0), 0);
  auto sol = lp::solve_lp(one.model);
  if (!sol.optimal()) throw std::runtime_error("slot running-cost LP failed to solve");
  return sol.objective_value;
}

ScheduleCost schedule_cost(const SchedulePlan& plan, const CostParams& costs) {
  ScheduleCost out;
  const std::vector<int>* prev = &plan.initial_state;
  for (const auto& sp : plan.slots) {
    for (std::size_t m = 0; m < sp.servers.size(); ++m) {
      out.running += costs.E_r * sp.servers[m];
      int delta = sp.servers[m] - (*prev)[m];
      if (delta > 0) out.switching += costs.E_s * delta;
    }
    prev = &sp.servers;
  }
  out.total = out.running + out.switching;
  return out;
}

DayHistory day_history(const TraceSeries& series, int slots_per_day, DayClass day_class) {
  if (slots_per_day <= 0) throw std::invalid_argument("slots_per_day must be positive");
  if (series.slot_length <= 0 || 86400 % series.slot_length != 0 ||
      86400 / series.slot_length != slots_per_day)
    throw std::invalid_argument("trace slot length does not tile the day into slots_per_day");
  const int M = series.station_count();
  DayHistory hist;
  hist.w_bar.assign(slots_per_day, Vec(M, 0.0));
  hist.frames.assign(slots_per_day, {});
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    if (series.labels[i].day_class != day_class) continue;
    const auto& fr = series.frames[i];
    std::int64_t sec_of_day = ((fr.timestamp % 86400) + 86400) % 86400;
    int slot = static_cast<int>(sec_of_day / series.slot_length);
    hist.frames[slot].push_back(fr.load);
  }
  for (int t = 0; t < slots_per_day; ++t) {
    if (hist.frames[t].empty()) continue;
    for (const auto& f : hist.frames[t])
      for (int m = 0; m < M; ++m) hist.w_bar[t][m] += f[m];
    for (int m = 0; m < M; ++m) hist.w_bar[t][m] /= static_cast<double>(hist.frames[t].size());
  }
  return hist;
}

}  // namespace edgeplan
