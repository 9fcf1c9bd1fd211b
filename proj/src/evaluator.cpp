#include "edgeplan/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgeplan/lp.hpp"
#include "edgeplan/rng.hpp"

namespace edgeplan {

const char* to_string(PolicySpec::Kind kind) {
  switch (kind) {
    case PolicySpec::Kind::Random: return "random";
    case PolicySpec::Kind::Clustering: return "clustering";
    case PolicySpec::Kind::Uniform: return "uniform";
    case PolicySpec::Kind::TwithoutLB: return "twithoutlb";
    case PolicySpec::Kind::TwithLB: return "twithlb";
    case PolicySpec::Kind::RoRp: return "ro_rp";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Rejection LP session
// ---------------------------------------------------------------------------

struct RejectionEvaluator::Impl {
  Neighborhood nbh;
  double C;
  int M;

  // Load-routed form of the rejection program: variables carry transported
  // workload, so the matrix is fixed and only the rhs moves between frames.
  lp::LinearModel model;
  std::unique_ptr<lp::SimplexSolver> session;
  std::vector<double> rhs;
  std::vector<std::vector<int>> v;  // [m][pos] -> var
  std::vector<int> r;

  Impl(Neighborhood nbh_in, double C_in) : nbh(std::move(nbh_in)), C(C_in) {
    nbh.validate();
    if (!(C > 0)) throw std::invalid_argument("server capacity must be positive");
    M = nbh.size();
    v.resize(M);
    for (int m = 0; m < M; ++m)
      for (int n : nbh.omega[m])
        v[m].push_back(model.add_var("v_" + std::to_string(m) + "_" + std::to_string(n)));
    r.resize(M);
    for (int n = 0; n < M; ++n) r[n] = model.add_var("r_" + std::to_string(n));

    for (int m = 0; m < M; ++m) {
      lp::Terms ts;
      for (int var : v[m]) ts.push_back({var, 1.0});
      model.add_constraint(std::move(ts), lp::Rel::Eq, 0.0);
    }
    std::vector<lp::Terms> cap(M);
    for (int m = 0; m < M; ++m)
      for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
        cap[nbh.omega[m][p]].push_back({v[m][p], 1.0});
    for (int n = 0; n < M; ++n) {
      cap[n].push_back({r[n], -1.0});
      model.add_constraint(cap[n], lp::Rel::LessEq, 0.0);
    }
    lp::Terms obj;
    for (int n = 0; n < M; ++n) obj.push_back({r[n], 1.0});
    model.set_objective(lp::Sense::Minimize, obj);
    rhs.assign(model.cons.size(), 0.0);
  }

  lp::LpSolution run(const Vec& w, const Vec& s_active) {
    if (static_cast<int>(w.size()) != M || static_cast<int>(s_active.size()) != M)
      throw std::invalid_argument("frame or placement length does not match station count");
    for (int m = 0; m < M; ++m) {
      if (!(w[m] >= 0) || !std::isfinite(w[m]))
        throw std::invalid_argument("workload must be finite and nonnegative");
      if (!(s_active[m] >= 0)) throw std::invalid_argument("active servers must be nonnegative");
      rhs[m] = w[m];
      rhs[M + m] = C * s_active[m];
    }
    lp::LpSolution sol;
    if (!session) {
      for (std::size_t i = 0; i < rhs.size(); ++i) model.cons[i].rhs = rhs[i];
      session = std::make_unique<lp::SimplexSolver>(model);
      sol = session->solve();
    } else {
      sol = session->resolve(rhs);
    }
    if (!sol.optimal())
      throw std::runtime_error("rejection LP failed to solve (it is feasible by construction)");
    return sol;
  }

  double objective(const Vec& w, const lp::LpSolution& sol) const {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    double rej = sol.objective_value;
    if (rej < 1e-9 * std::max(1.0, total)) rej = 0.0;
    return std::min(std::max(rej, 0.0), total);
  }
};

RejectionEvaluator::RejectionEvaluator(Neighborhood nbh, double C)
    : impl_(std::make_unique<Impl>(std::move(nbh), C)) {}
RejectionEvaluator::~RejectionEvaluator() = default;
RejectionEvaluator::RejectionEvaluator(RejectionEvaluator&&) noexcept = default;
RejectionEvaluator& RejectionEvaluator::operator=(RejectionEvaluator&&) noexcept = default;

const Neighborhood& RejectionEvaluator::neighborhood() const { return impl_->nbh; }
double RejectionEvaluator::capacity() const { return impl_->C; }

double RejectionEvaluator::rejected(const Vec& w, const Vec& s_active) {
  auto sol = impl_->run(w, s_active);
  return impl_->objective(w, sol);
}

std::pair<double, Matrix> RejectionEvaluator::rejected_with_routing(const Vec& w,
                                                                    const Vec& s_active) {
  auto sol = impl_->run(w, s_active);
  const int M = impl_->M;
  Matrix u(M, Vec(M, 0.0));
  for (int m = 0; m < M; ++m) {
    if (w[m] > 0) {
      // Normalizing by the transported row total keeps rows exactly stochastic.
      double row = 0.0;
      for (std::size_t p = 0; p < impl_->v[m].size(); ++p) row += sol.values[impl_->v[m][p]];
      for (std::size_t p = 0; p < impl_->v[m].size(); ++p)
        u[m][impl_->nbh.omega[m][p]] = row > 0 ? sol.values[impl_->v[m][p]] / row : 0.0;
      if (row <= 0) u[m][m] = 1.0;
    } else {
      double share = 1.0 / static_cast<double>(impl_->nbh.omega[m].size());
      for (int n : impl_->nbh.omega[m]) u[m][n] = share;
    }
  }
  return {impl_->objective(w, sol), std::move(u)};
}

std::pair<double, Matrix> min_rejection(const Vec& w, const Vec& s_active, double C,
                                        const Neighborhood& nbh) {
  RejectionEvaluator eval(nbh, C);
  return eval.rejected_with_routing(w, s_active);
}

// ---------------------------------------------------------------------------
// Baseline policies
// ---------------------------------------------------------------------------

namespace {

// Largest-remainder apportionment of K into integer counts proportional to
// the weights.
std::vector<int> apportion(const Vec& weights, int K) {
  const int n = static_cast<int>(weights.size());
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  Vec w = weights;
  if (total <= 0) {
    w.assign(n, 1.0);
    total = n;
  }
  std::vector<int> out(n, 0);
  std::vector<std::pair<double, int>> rema;
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    double share = static_cast<double>(K) * w[i] / total;
    out[i] = static_cast<int>(std::floor(share + 1e-12));
    assigned += out[i];
    rema.push_back({share - out[i], i});
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < K - assigned; ++i) out[rema[i % n].second] += 1;
  return out;
}

}  // namespace

IntegerPlacement baseline_place(const PolicySpec& policy, const StationSet& stations,
                                const Vec& avg_workload, const RepresentativeSet& reps,
                                const Neighborhood& nbh, const PlacementParams& params) {
  const int M = stations.size();
  IntegerPlacement out;
  out.s.assign(M, 0);
  out.provenance = to_string(policy.kind);

  switch (policy.kind) {
    case PolicySpec::Kind::Random: {
      Rng rng(policy.seed);
      for (int i = 0; i < params.K; ++i) out.s[rng.next_index(M)] += 1;
      break;
    }
    case PolicySpec::Kind::Clustering: {
      if (policy.k < 1 || policy.k > M) throw std::invalid_argument("cluster count invalid");
      Clustering cl = kmeans_clusters(stations, policy.k, policy.seed);
      Vec sizes(policy.k, 0.0);
      for (int m = 0; m < M; ++m) sizes[cl.assignment[m]] += 1.0;
      auto counts = apportion(sizes, params.K);
      for (int c = 0; c < policy.k; ++c) out.s[cl.centroid_station[c]] += counts[c];
      break;
    }
    case PolicySpec::Kind::Uniform: {
      if (!(policy.zone_size > 0)) throw std::invalid_argument("zone size must be positive");
      double minx = stations.stations[0].x, miny = stations.stations[0].y;
      for (const auto& st : stations.stations) {
        minx = std::min(minx, st.x);
        miny = std::min(miny, st.y);
      }
      // Zone id -> members, keyed on the grid cell.
      std::map<std::pair<int, int>, std::vector<int>> zones;
      for (int m = 0; m < M; ++m) {
        int zx = static_cast<int>(std::floor((stations.stations[m].x - minx) / policy.zone_size));
        int zy = static_cast<int>(std::floor((stations.stations[m].y - miny) / policy.zone_size));
        zones[{zx, zy}].push_back(m);
      }
      Vec sizes;
      std::vector<int> zone_center;
      for (const auto& [cell, members] : zones) {
        sizes.push_back(static_cast<double>(members.size()));
        double cx = minx + (cell.first + 0.5) * policy.zone_size;
        double cy = miny + (cell.second + 0.5) * policy.zone_size;
        int best = members[0];
        double bd = std::numeric_limits<double>::infinity();
        for (int m : members) {
          double dx = stations.stations[m].x - cx, dy = stations.stations[m].y - cy;
          if (dx * dx + dy * dy < bd) {
            bd = dx * dx + dy * dy;
            best = m;
          }
        }
        zone_center.push_back(best);
      }
      auto counts = apportion(sizes, params.K);
      for (std::size_t z = 0; z < zone_center.size(); ++z) out.s[zone_center[z]] += counts[z];
      break;
    }
    case PolicySpec::Kind::TwithoutLB: {
      if (policy.k < 1 || policy.k > M) throw std::invalid_argument("cluster count invalid");
      if (static_cast<int>(avg_workload.size()) != M)
        throw std::invalid_argument("workload vector length mismatch");
      Clustering cl = kmeans_clusters(stations, policy.k, policy.seed);
      Vec loads(policy.k, 0.0);
      for (int m = 0; m < M; ++m) loads[cl.assignment[m]] += avg_workload[m];
      auto counts = apportion(loads, params.K);
      for (int c = 0; c < policy.k; ++c) out.s[cl.centroid_station[c]] += counts[c];
      break;
    }
    case PolicySpec::Kind::TwithLB: {
      RepresentativeSet single;
      single.mode = RepresentativeMode::Average;
      single.vectors.push_back(avg_workload);
      single.group_keys.push_back(GroupKey{});
      FractionalPlacement frac = solve_ro_fractional(single, nbh, params);
      out = round_heuristic(frac, RoundingScheme::SRPF, nbh, params.K, policy.seed);
      out.provenance = to_string(policy.kind);
      break;
    }
    case PolicySpec::Kind::RoRp: {
      RoRpSolver solver(reps, nbh, params.C);
      FractionalPlacement ro = solver.solve_ro(params.K);
      FractionalPlacement rp = solver.solve_rp(params.K, ro.beta_star);
      out = round_heuristic(rp, policy.scheme, nbh, params.K, policy.seed);
      out.provenance = to_string(policy.kind);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace-driven evaluation
// ---------------------------------------------------------------------------

namespace {

SimulationReport finalize(std::vector<SimulationReport::FrameResult> frames) {
  SimulationReport rep;
  rep.per_frame = std::move(frames);
  double rate_sum = 0.0;
  for (const auto& fr : rep.per_frame) {
    rep.total_workload += fr.total;
    rep.total_rejected += fr.rejected;
    rep.max_rate = std::max(rep.max_rate, fr.rate);
    rate_sum += fr.rate;
  }
  rep.mean_rate = rep.per_frame.empty() ? 0.0 : rate_sum / rep.per_frame.size();
  return rep;
}

SimulationReport::FrameResult frame_result(RejectionEvaluator& eval, std::int64_t slot,
                                           const Vec& w, const Vec& s_active) {
  SimulationReport::FrameResult fr;
  fr.slot = slot;
  fr.total = std::accumulate(w.begin(), w.end(), 0.0);
  fr.rejected = eval.rejected(w, s_active);
  fr.rate = fr.total > 0 ? fr.rejected / fr.total : 0.0;
  return fr;
}

}  // namespace

SimulationReport evaluate_placement(const IntegerPlacement& placement, const TraceSeries& trace,
                                    double C, const Neighborhood& nbh) {
  if (static_cast<int>(placement.s.size()) != nbh.size())
    throw std::invalid_argument("placement length does not match station count");
  RejectionEvaluator eval(nbh, C);
  Vec s(placement.s.begin(), placement.s.end());
  std::vector<SimulationReport::FrameResult> frames;
  frames.reserve(trace.frames.size());
  for (const auto& fr : trace.frames)
    frames.push_back(frame_result(eval, fr.slot_index, fr.load, s));
  return finalize(std::move(frames));
}

SimulationReport evaluate_schedule(const SchedulePlan& plan, const TraceSeries& trace, double C,
                                   const Neighborhood& nbh, const CostParams& costs) {
  const int N = static_cast<int>(plan.slots.size());
  if (N == 0) throw std::invalid_argument("schedule plan is empty");
  if (trace.slot_length <= 0 || 86400 % trace.slot_length != 0 ||
      86400 / trace.slot_length != N)
    throw std::invalid_argument("trace slots do not align with the plan's slots per day");

  RejectionEvaluator eval(nbh, C);
  std::vector<SimulationReport::FrameResult> frames;
  frames.reserve(trace.frames.size());
  for (const auto& fr : trace.frames) {
    std::int64_t sec_of_day = ((fr.timestamp % 86400) + 86400) % 86400;
    int slot_of_day = static_cast<int>(sec_of_day / trace.slot_length);
    const auto& sp = plan.slots[slot_of_day];
    Vec s(sp.servers.begin(), sp.servers.end());
    frames.push_back(frame_result(eval, fr.slot_index, fr.load, s));
  }
  SimulationReport rep = finalize(std::move(frames));
  rep.energy = schedule_cost(plan, costs);
  return rep;
}

}  // namespace edgeplan
