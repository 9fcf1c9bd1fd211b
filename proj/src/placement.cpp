#include "edgeplan/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgeplan/lp.hpp"
#include "edgeplan/rng.hpp"

namespace edgeplan {

namespace {

constexpr double kIntSnapTol = 1e-9;

void check_inputs(const RepresentativeSet& reps, const Neighborhood& nbh, double C) {
  if (reps.count() < 1) throw std::invalid_argument("representative set is empty");
  nbh.validate();
  const int M = nbh.size();
  for (const auto& w : reps.vectors) {
    if (static_cast<int>(w.size()) != M)
      throw std::invalid_argument("representative vector length does not match station count");
    double total = 0.0;
    for (double v : w) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("representative workloads must be finite and nonnegative");
      total += v;
    }
    if (total <= 0.0)
      throw std::invalid_argument("every representative vector must carry positive total workload");
  }
  if (!(C > 0.0)) throw std::invalid_argument("server capacity must be positive");
}

Vec peak_workloads(const RepresentativeSet& reps, int M) {
  Vec peak(M, 0.0);
  for (const auto& w : reps.vectors)
    for (int m = 0; m < M; ++m) peak[m] = std::max(peak[m], w[m]);
  return peak;
}

}  // namespace

std::string to_string(RoundingScheme s) {
  switch (s) {
    case RoundingScheme::SRPF: return "srpf";
    case RoundingScheme::RR: return "rr";
    case RoundingScheme::LRPF: return "lrpf";
    case RoundingScheme::LDF: return "ldf";
    case RoundingScheme::LSF: return "lsf";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// RO / RP linear programs
// ---------------------------------------------------------------------------

struct RoRpSolver::Impl {
  RepresentativeSet reps;
  Neighborhood nbh;
  double C;
  std::optional<Vec> caps;
  int M = 0, L = 0;

  // Substituted RO program: maximize kappa with row sums w^l_m * kappa,
  // column sums bounded by s, and sum(s) = K. Only the K row's rhs changes
  // across calls, so re-solves warm-start from the last basis.
  lp::LinearModel ro_model;
  std::unique_ptr<lp::SimplexSolver> ro_session;
  std::vector<double> ro_rhs;
  std::vector<std::vector<std::vector<int>>> ro_u;  // [l][m][pos] -> var
  std::vector<int> ro_s;
  int ro_kappa = -1;
  int ro_k_row = -1;

  // Pooling program at fixed beta: maximize eta; the demand rows' rhs carry
  // w^l_m / (C beta) and the K row carries K.
  lp::LinearModel rp_model;
  std::unique_ptr<lp::SimplexSolver> rp_session;
  std::vector<double> rp_rhs;
  std::vector<std::vector<std::vector<int>>> rp_u;
  std::vector<int> rp_s;
  int rp_eta = -1;
  std::vector<std::pair<int, int>> rp_demand_rows;  // (row, l*M+m)
  int rp_k_row = -1;

  Impl(RepresentativeSet reps_in, Neighborhood nbh_in, double C_in, std::optional<Vec> caps_in)
      : reps(std::move(reps_in)), nbh(std::move(nbh_in)), C(C_in), caps(std::move(caps_in)) {
    check_inputs(reps, nbh, C);
    M = nbh.size();
    L = reps.count();
    if (caps) {
      if (static_cast<int>(caps->size()) != M)
        throw std::invalid_argument("cap vector length does not match station count");
      for (double c : *caps)
        if (!(c >= 0.0)) throw std::invalid_argument("caps must be nonnegative");
    }
    build_ro();
    build_rp();
  }

  double cap_of(int m) const { return caps ? (*caps)[m] : lp::kInf; }

  void build_ro() {
    ro_u.assign(L, std::vector<std::vector<int>>(M));
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < M; ++m)
        for (int n : nbh.omega[m])
          ro_u[l][m].push_back(ro_model.add_var(
              "u_" + std::to_string(l) + "_" + std::to_string(m) + "_" + std::to_string(n)));
    ro_s.resize(M);
    for (int m = 0; m < M; ++m) ro_s[m] = ro_model.add_var("s_" + std::to_string(m), 0.0, cap_of(m));
    ro_kappa = ro_model.add_var("kappa");

    for (int l = 0; l < L; ++l) {
      for (int m = 0; m < M; ++m) {
        lp::Terms ts;
        for (int v : ro_u[l][m]) ts.push_back({v, 1.0});
        ts.push_back({ro_kappa, -reps.vectors[l][m]});
        ro_model.add_constraint(std::move(ts), lp::Rel::Eq, 0.0);
      }
    }
    std::vector<lp::Terms> cap_terms(M);
    for (int l = 0; l < L; ++l) {
      for (auto& t : cap_terms) t.clear();
      for (int m = 0; m < M; ++m)
        for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
          cap_terms[nbh.omega[m][p]].push_back({ro_u[l][m][p], 1.0});
      for (int n = 0; n < M; ++n) {
        cap_terms[n].push_back({ro_s[n], -1.0});
        ro_model.add_constraint(cap_terms[n], lp::Rel::LessEq, 0.0);
      }
    }
    lp::Terms total;
    for (int v : ro_s) total.push_back({v, 1.0});
    ro_k_row = ro_model.add_constraint(std::move(total), lp::Rel::Eq, 0.0);
    ro_model.set_objective(lp::Sense::Maximize, {{ro_kappa, 1.0}});
    ro_rhs.assign(ro_model.cons.size(), 0.0);
  }

  void build_rp() {
    rp_u.assign(L, std::vector<std::vector<int>>(M));
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < M; ++m)
        for (int n : nbh.omega[m])
          rp_u[l][m].push_back(rp_model.add_var(
              "u_" + std::to_string(l) + "_" + std::to_string(m) + "_" + std::to_string(n)));
    rp_s.resize(M);
    for (int m = 0; m < M; ++m) rp_s[m] = rp_model.add_var("s_" + std::to_string(m), 0.0, cap_of(m));
    rp_eta = rp_model.add_var("eta");

    for (int l = 0; l < L; ++l) {
      for (int m = 0; m < M; ++m) {
        lp::Terms ts;
        for (int v : rp_u[l][m]) ts.push_back({v, 1.0});
        int row = rp_model.add_constraint(std::move(ts), lp::Rel::Eq, 0.0);
        rp_demand_rows.push_back({row, l * M + m});
      }
    }
    std::vector<lp::Terms> cap_terms(M);
    for (int l = 0; l < L; ++l) {
      for (auto& t : cap_terms) t.clear();
      for (int m = 0; m < M; ++m)
        for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
          cap_terms[nbh.omega[m][p]].push_back({rp_u[l][m][p], 1.0});
      for (int n = 0; n < M; ++n) {
        cap_terms[n].push_back({rp_s[n], -1.0});
        rp_model.add_constraint(cap_terms[n], lp::Rel::LessEq, 0.0);
      }
    }
    Vec peak = peak_workloads(reps, M);
    for (int m = 0; m < M; ++m) {
      if (peak[m] <= 0.0) continue;
      lp::Terms ts{{rp_eta, peak[m]}};
      for (int n : nbh.omega[m]) ts.push_back({rp_s[n], -1.0});
      rp_model.add_constraint(std::move(ts), lp::Rel::LessEq, 0.0);
    }
    lp::Terms total;
    for (int v : rp_s) total.push_back({v, 1.0});
    rp_k_row = rp_model.add_constraint(std::move(total), lp::Rel::Eq, 0.0);
    rp_model.set_objective(lp::Sense::Maximize, {{rp_eta, 1.0}});
    rp_rhs.assign(rp_model.cons.size(), 0.0);
  }

  void validate_k(int K) const {
    if (K < 1) throw std::invalid_argument("K must be at least 1");
    if (caps) {
      double total = 0.0;
      for (double c : *caps) total += c;
      if (static_cast<double>(K) > total + 1e-9)
        throw std::invalid_argument("K exceeds the total station caps");
    }
  }

  // Routing recovery: each row is normalized by its own transported mass so
  // the result is exactly row-stochastic; empty rows spread uniformly.
  Matrix recover_routing(const Matrix& uprime, int l) const {
    Matrix u(M, Vec(M, 0.0));
    for (int m = 0; m < M; ++m) {
      double rowsum = 0.0;
      for (int n = 0; n < M; ++n) rowsum += uprime[m][n];
      if (rowsum > 1e-13) {
        for (int n = 0; n < M; ++n) u[m][n] = uprime[m][n] / rowsum;
      } else {
        double share = 1.0 / static_cast<double>(nbh.omega[m].size());
        for (int n : nbh.omega[m]) u[m][n] = share;
      }
    }
    (void)l;
    return u;
  }

  FractionalPlacement solve_ro(int K) {
    validate_k(K);
    ro_rhs[ro_k_row] = static_cast<double>(K);
    lp::LpSolution sol;
    if (!ro_session) {
      for (std::size_t i = 0; i < ro_rhs.size(); ++i) ro_model.cons[i].rhs = ro_rhs[i];
      ro_session = std::make_unique<lp::SimplexSolver>(ro_model);
      sol = ro_session->solve();
    } else {
      sol = ro_session->resolve(ro_rhs);
    }
    if (sol.status != lp::SolveStatus::Optimal)
      throw std::runtime_error("robust placement LP did not solve to optimality");
    double kappa = sol.values[ro_kappa];
    if (!(kappa > 1e-12))
      throw std::runtime_error(
          "robust placement LP is degenerate: no capacity path serves the workload "
          "(check that every neighborhood contains its own station)");

    FractionalPlacement frac;
    frac.kappa = kappa;
    frac.beta_star = 1.0 / (C * kappa);
    frac.u_prime.assign(L, Matrix(M, Vec(M, 0.0)));
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < M; ++m)
        for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
          frac.u_prime[l][m][nbh.omega[m][p]] = std::max(0.0, sol.values[ro_u[l][m][p]]);

    // Tighten s to the per-station peak transported load. At an exact optimum
    // this equals the LP's s; doing it explicitly makes the column sums and
    // the K total exact for the flow rounding.
    Vec s(M, 0.0);
    for (int l = 0; l < L; ++l)
      for (int n = 0; n < M; ++n) {
        double col = 0.0;
        for (int m = 0; m < M; ++m) col += frac.u_prime[l][m][n];
        s[n] = std::max(s[n], col);
      }
    double gap = static_cast<double>(K) - std::accumulate(s.begin(), s.end(), 0.0);
    if (std::abs(gap) > 1e-6 * std::max(1.0, static_cast<double>(K)))
      throw std::runtime_error("robust placement LP drifted beyond tolerance");
    if (gap != 0.0) {
      for (int n = 0; n < M; ++n) {
        if (s[n] + gap >= 0.0 && s[n] + gap <= cap_of(n) + 1e-9) {
          s[n] += gap;
          break;
        }
      }
    }
    frac.s_tilde = std::move(s);
    frac.routing.reserve(L);
    for (int l = 0; l < L; ++l) frac.routing.push_back(recover_routing(frac.u_prime[l], l));
    return frac;
  }

  FractionalPlacement solve_rp(int K, double beta_star) {
    validate_k(K);
    if (!(beta_star > 0.0)) throw std::invalid_argument("beta_star must be positive");
    auto attempt = [&](double beta) -> lp::LpSolution {
      double kappa = 1.0 / (C * beta);
      for (auto [row, lm] : rp_demand_rows)
        rp_rhs[row] = reps.vectors[lm / M][lm % M] * kappa;
      rp_rhs[rp_k_row] = static_cast<double>(K);
      if (!rp_session) {
        for (std::size_t i = 0; i < rp_rhs.size(); ++i) rp_model.cons[i].rhs = rp_rhs[i];
        rp_session = std::make_unique<lp::SimplexSolver>(rp_model);
        return rp_session->solve();
      }
      return rp_session->resolve(rp_rhs);
    };
    double beta = beta_star;
    lp::LpSolution sol = attempt(beta);
    if (sol.status != lp::SolveStatus::Optimal) {
      beta = beta_star * (1.0 + 1e-6);  // absorb tolerance drift from the RO solve
      sol = attempt(beta);
    }
    if (sol.status != lp::SolveStatus::Optimal)
      throw std::runtime_error("resource pooling LP infeasible at the given beta_star");

    FractionalPlacement frac;
    frac.kappa = 1.0 / (C * beta);
    frac.beta_star = beta_star;
    frac.eta_star = sol.values[rp_eta];
    frac.s_tilde.assign(M, 0.0);
    for (int m = 0; m < M; ++m) frac.s_tilde[m] = sol.values[rp_s[m]];
    frac.u_prime.assign(L, Matrix(M, Vec(M, 0.0)));
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < M; ++m)
        for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
          frac.u_prime[l][m][nbh.omega[m][p]] = std::max(0.0, sol.values[rp_u[l][m][p]]);
    frac.routing.reserve(L);
    for (int l = 0; l < L; ++l) frac.routing.push_back(recover_routing(frac.u_prime[l], l));
    return frac;
  }
};

RoRpSolver::RoRpSolver(RepresentativeSet reps, Neighborhood nbh, double C, std::optional<Vec> s_cap)
    : impl_(std::make_unique<Impl>(std::move(reps), std::move(nbh), C, std::move(s_cap))) {}
RoRpSolver::~RoRpSolver() = default;
RoRpSolver::RoRpSolver(RoRpSolver&&) noexcept = default;
RoRpSolver& RoRpSolver::operator=(RoRpSolver&&) noexcept = default;

FractionalPlacement RoRpSolver::solve_ro(int K) { return impl_->solve_ro(K); }
FractionalPlacement RoRpSolver::solve_rp(int K, double beta_star) {
  return impl_->solve_rp(K, beta_star);
}

FractionalPlacement solve_ro_fractional(const RepresentativeSet& reps, const Neighborhood& nbh,
                                        const PlacementParams& params) {
  RoRpSolver solver(reps, nbh, params.C);
  return solver.solve_ro(params.K);
}

FractionalPlacement solve_rp_fractional(const RepresentativeSet& reps, const Neighborhood& nbh,
                                        const PlacementParams& params, double beta_star) {
  RoRpSolver solver(reps, nbh, params.C);
  return solver.solve_rp(params.K, beta_star);
}

// ---------------------------------------------------------------------------

double pooling_factor(const Vec& s, const RepresentativeSet& reps, const Neighborhood& nbh) {
  const int M = nbh.size();
  Vec peak = peak_workloads(reps, M);
  double eta = std::numeric_limits<double>::infinity();
  for (int m = 0; m < M; ++m) {
    if (peak[m] <= 0.0) continue;
    double pool = 0.0;
    for (int n : nbh.omega[m]) pool += s[n];
    eta = std::min(eta, pool / peak[m]);
  }
  return eta;
}

double pooling_factor(const std::vector<int>& s, const RepresentativeSet& reps,
                      const Neighborhood& nbh) {
  Vec sd(s.begin(), s.end());
  return pooling_factor(sd, reps, nbh);
}

IntegerPlacement round_heuristic(const FractionalPlacement& frac, RoundingScheme scheme,
                                 const Neighborhood& nbh, int K, std::uint64_t seed) {
  double total = std::accumulate(frac.s_tilde.begin(), frac.s_tilde.end(), 0.0);
  if (std::abs(total - K) > 1e-6 * std::max(1.0, static_cast<double>(K)))
    throw std::invalid_argument("fractional placement does not sum to K");
  return round_up_to_target(frac.s_tilde, scheme, nbh, K, seed);
}

IntegerPlacement round_up_to_target(const Vec& st, RoundingScheme scheme, const Neighborhood& nbh,
                                    int K, std::uint64_t seed) {
  const int M = nbh.size();
  if (static_cast<int>(st.size()) != M)
    throw std::invalid_argument("placement length does not match station count");

  std::vector<int> floors(M);
  Vec fracpart(M);
  for (int m = 0; m < M; ++m) {
    double r = std::round(st[m]);
    if (std::abs(st[m] - r) < kIntSnapTol) {
      floors[m] = static_cast<int>(r);
      fracpart[m] = 0.0;
    } else {
      floors[m] = static_cast<int>(std::floor(st[m]));
      fracpart[m] = st[m] - floors[m];
    }
  }
  int R = K - std::accumulate(floors.begin(), floors.end(), 0);
  std::vector<int> eligible;
  for (int m = 0; m < M; ++m)
    if (fracpart[m] > 0.0) eligible.push_back(m);
  if (R < 0 || R > static_cast<int>(eligible.size()))
    throw std::runtime_error("rounding drift: round-ups exceed eligible stations");

  std::vector<int> chosen;
  if (R > 0) {
    if (scheme == RoundingScheme::RR) {
      Rng rng(seed);
      auto pick = rng.sample_without_replacement(eligible.size(), static_cast<std::size_t>(R));
      for (std::size_t p : pick) chosen.push_back(eligible[p]);
    } else {
      Vec pool(M, 0.0);
      for (int m = 0; m < M; ++m)
        for (int n : nbh.omega[m]) pool[m] += st[n];
      auto priority = [&](int m) -> double {
        switch (scheme) {
          case RoundingScheme::SRPF: return -pool[m];           // smallest pool first
          case RoundingScheme::LRPF: return pool[m];            // largest pool first
          case RoundingScheme::LDF: return fracpart[m];         // largest decimal first
          case RoundingScheme::LSF: return fracpart[m] / st[m];  // largest scale-down first
          default: return 0.0;
        }
      };
      std::stable_sort(eligible.begin(), eligible.end(), [&](int a, int b) {
        double pa = priority(a), pb = priority(b);
        if (pa != pb) return pa > pb;
        return a < b;
      });
      chosen.assign(eligible.begin(), eligible.begin() + R);
    }
  }
  IntegerPlacement out;
  out.s = floors;
  for (int m : chosen) out.s[m] += 1;
  out.provenance = to_string(scheme);
  return out;
}

Vec find_hull_weights(const Vec& w, const RepresentativeSet& reps) {
  const int L = reps.count();
  const int M = static_cast<int>(w.size());
  lp::LinearModel model;
  std::vector<int> lam(L);
  for (int l = 0; l < L; ++l) lam[l] = model.add_var("lambda_" + std::to_string(l));
  for (int m = 0; m < M; ++m) {
    if (w[m] <= 0.0) continue;
    lp::Terms ts;
    for (int l = 0; l < L; ++l)
      if (reps.vectors[l][m] > 0.0) ts.push_back({lam[l], reps.vectors[l][m]});
    if (ts.empty()) throw std::runtime_error("workload is outside the representative hull");
    model.add_constraint(std::move(ts), lp::Rel::GreaterEq, w[m]);
  }
  lp::Terms obj;
  for (int l = 0; l < L; ++l) obj.push_back({lam[l], 1.0});
  model.set_objective(lp::Sense::Minimize, obj);
  auto sol = lp::solve_lp(model);
  if (!sol.optimal() || sol.objective_value > 1.0 + 1e-7)
    throw std::runtime_error("workload is outside the representative hull");
  Vec lambda(L, 0.0);
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    lambda[l] = std::max(0.0, sol.values[lam[l]]);
    total += lambda[l];
  }
  if (total < 1.0) lambda[0] += 1.0 - total;  // padding keeps the cover valid
  return lambda;
}

Matrix construct_routing(const Vec& w, const RepresentativeSet& reps,
                         const std::vector<Matrix>& routing, const Vec& lambda,
                         const Neighborhood& nbh) {
  const int M = nbh.size();
  const int L = reps.count();
  if (static_cast<int>(lambda.size()) != L)
    throw std::invalid_argument("lambda length does not match the representative count");
  double lsum = 0.0;
  for (double v : lambda) {
    if (v < -1e-9) throw std::invalid_argument("lambda must be nonnegative");
    lsum += v;
  }
  if (std::abs(lsum - 1.0) > 1e-6) throw std::invalid_argument("lambda must sum to 1");
  for (int m = 0; m < M; ++m) {
    double hull = 0.0;
    for (int l = 0; l < L; ++l) hull += lambda[l] * reps.vectors[l][m];
    if (w[m] > hull + 1e-7 * std::max(1.0, hull))
      throw std::invalid_argument("workload exceeds the hull point; guarantee does not apply");
  }
  Matrix u(M, Vec(M, 0.0));
  for (int m = 0; m < M; ++m) {
    double denom = 0.0;
    for (int l = 0; l < L; ++l) denom += lambda[l] * reps.vectors[l][m];
    if (denom <= 0.0) {
      double share = 1.0 / static_cast<double>(nbh.omega[m].size());
      for (int n : nbh.omega[m]) u[m][n] = share;
      continue;
    }
    for (int l = 0; l < L; ++l) {
      double weight = lambda[l] * reps.vectors[l][m] / denom;
      if (weight == 0.0) continue;
      for (int n : nbh.omega[m]) u[m][n] += weight * routing[l][m][n];
    }
  }
  return u;
}

double utilization_bound(double beta_star, double eta_star, double gamma) {
  if (!(eta_star > 0.0)) throw std::invalid_argument("eta_star must be positive");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  return beta_star + gamma / eta_star;
}

}  // namespace edgeplan
