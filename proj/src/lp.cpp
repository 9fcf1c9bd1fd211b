#include "edgeplan/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edgeplan::lp {

namespace {

constexpr double kPivotTol = 1e-9;    // minimum pivot magnitude
constexpr double kDualTol = 1e-9;     // reduced-cost optimality tolerance
constexpr double kPrimalTol = 1e-9;   // bound violation tolerance inside the solver
constexpr int kStallLimit = 60;       // degenerate steps before switching to Bland's rule

bool is_finite(double v) { return std::isfinite(v); }

}  // namespace

int LinearModel::add_var(std::string name, double lower, double upper) {
  int idx = static_cast<int>(vars.size());
  name_index_.emplace(name, idx);
  vars.push_back(Variable{std::move(name), lower, upper});
  return idx;
}

int LinearModel::add_constraint(Terms terms, Rel rel, double rhs) {
  cons.push_back(Constraint{std::move(terms), rel, rhs});
  return static_cast<int>(cons.size()) - 1;
}

void LinearModel::set_objective(Sense s, Terms terms) {
  sense = s;
  objective = std::move(terms);
}

int LinearModel::var_index(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) throw ModelError("unknown variable: " + std::string(name));
  return it->second;
}

void LinearModel::validate() const {
  const int n = static_cast<int>(vars.size());
  for (const auto& v : vars) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw ModelError("variable '" + v.name + "' has invalid bounds");
    if (v.lower == kInf || v.upper == -kInf)
      throw ModelError("variable '" + v.name + "' has unbounded-wrong-way bounds");
  }
  auto check_terms = [n](const Terms& ts, const char* where) {
    for (auto [j, a] : ts) {
      if (j < 0 || j >= n) throw ModelError(std::string("term references undeclared variable in ") + where);
      if (!is_finite(a)) throw ModelError(std::string("non-finite coefficient in ") + where);
    }
  };
  for (const auto& c : cons) {
    check_terms(c.terms, "constraint");
    if (!is_finite(c.rhs)) throw ModelError("non-finite constraint rhs");
  }
  check_terms(objective, "objective");
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

struct SimplexSolver::Impl {
  enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

  // Column-wise sparse matrix over all variables (structural, slack, artificial).
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> lo, up, cost;  // cost is the phase-2 objective, minimize sense
  std::vector<VarState> state;
  std::vector<double> nb_value;  // value of each nonbasic variable (lo/up/0)

  int m = 0;               // rows
  int n_struct = 0;        // structural variables
  int n_slack = 0;         // == m
  std::vector<double> b;   // row rhs
  Sense model_sense = Sense::Minimize;

  std::vector<int> basic;  // var index per row
  Eigen::VectorXd xb;      // basic values per row
  Eigen::MatrixXd binv;

  bool have_optimal_basis = false;
  long iterations = 0;

  explicit Impl(const LinearModel& model) {
    model.validate();
    m = static_cast<int>(model.cons.size());
    n_struct = static_cast<int>(model.vars.size());
    n_slack = m;
    model_sense = model.sense;

    const int total = n_struct + n_slack;
    cols.resize(total);
    lo.assign(total, 0.0);
    up.assign(total, kInf);
    cost.assign(total, 0.0);

    for (int j = 0; j < n_struct; ++j) {
      lo[j] = model.vars[j].lower;
      up[j] = model.vars[j].upper;
    }
    b.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      const auto& c = model.cons[i];
      b[i] = c.rhs;
      for (auto [j, a] : c.terms) {
        if (a != 0.0) cols[j].push_back({i, a});
      }
      int s = n_struct + i;
      cols[s].push_back({i, 1.0});
      switch (c.rel) {
        case Rel::LessEq: lo[s] = 0.0; up[s] = kInf; break;
        case Rel::GreaterEq: lo[s] = -kInf; up[s] = 0.0; break;
        case Rel::Eq: lo[s] = 0.0; up[s] = 0.0; break;
      }
    }
    // Merge duplicate variable entries within a constraint.
    for (auto& col : cols) {
      std::sort(col.begin(), col.end());
      std::size_t w = 0;
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (w > 0 && col[w - 1].first == col[r].first) {
          col[w - 1].second += col[r].second;
        } else {
          col[w++] = col[r];
        }
      }
      col.resize(w);
    }
    double sgn = (model_sense == Sense::Maximize) ? -1.0 : 1.0;
    for (auto [j, a] : model.objective) cost[j] += sgn * a;
  }

  int num_vars() const { return static_cast<int>(cols.size()); }

  double nonbasic_start_value(int j) const {
    if (is_finite(lo[j])) return lo[j];
    if (is_finite(up[j])) return up[j];
    return 0.0;
  }

  VarState nonbasic_start_state(int j) const {
    if (is_finite(lo[j])) return VarState::AtLower;
    if (is_finite(up[j])) return VarState::AtUpper;
    return VarState::Free;
  }

  // b minus contributions of nonbasic variables.
  Eigen::VectorXd rhs_minus_nonbasic() const {
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    for (int j = 0; j < num_vars(); ++j) {
      if (state[j] == VarState::Basic) continue;
      double v = nb_value[j];
      if (v == 0.0) continue;
      for (auto [i, a] : cols[j]) r(i) -= a * v;
    }
    return r;
  }

  void refactorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m; ++r) {
      for (auto [i, a] : cols[basic[r]]) B(i, r) = a;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    // PartialPivLU has no rank query; detect singularity via the residual below.
    binv = lu.inverse();
    xb = binv * rhs_minus_nonbasic();
    Eigen::VectorXd resid = B * xb - rhs_minus_nonbasic();
    if (!resid.allFinite() || resid.lpNorm<Eigen::Infinity>() > 1e-5 * (1.0 + xb.lpNorm<Eigen::Infinity>()))
      throw std::runtime_error("simplex: basis refactorization failed (singular basis)");
  }

  // alpha = binv * column j
  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    for (auto [i, a] : cols[j]) alpha.noalias() += a * binv.col(i);
    return alpha;
  }

  // y = binv^T c_basic, exploiting sparsity of the basic cost vector.
  Eigen::VectorXd btran_costs(const std::vector<double>& cvec) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < m; ++r) {
      double cb = cvec[basic[r]];
      if (cb != 0.0) y.noalias() += cb * binv.row(r).transpose();
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& cvec, const Eigen::VectorXd& y) const {
    double d = cvec[j];
    for (auto [i, a] : cols[j]) d -= y(i) * a;
    return d;
  }

  void pivot_update(int row, const Eigen::VectorXd& alpha) {
    const double piv = alpha(row);
    Eigen::RowVectorXd pr = binv.row(row) / piv;
    Eigen::VectorXd v = alpha;
    v(row) = 0.0;
    binv.noalias() -= v * pr;
    binv.row(row) = pr;
  }

  // One primal simplex run with the given costs. Returns Optimal or Unbounded.
  SolveStatus primal(const std::vector<double>& cvec) {
    bool bland = false;
    int stall = 0;
    const long cap = 2000L * (m + num_vars()) + 20000;
    long since_check = 0;
    for (;;) {
      if (++iterations > cap) throw std::runtime_error("simplex: iteration limit exceeded");
      if (++since_check >= 1024) {
        since_check = 0;
        sanity_refactor_if_drifting();
      }
      Eigen::VectorXd y = btran_costs(cvec);
      int enter = -1;
      int dir = +1;
      double best = bland ? kInf : kDualTol;
      for (int j = 0; j < num_vars(); ++j) {
        VarState st = state[j];
        if (st == VarState::Basic) continue;
        if (lo[j] == up[j]) continue;  // fixed
        double d = reduced_cost(j, cvec, y);
        int cand_dir = 0;
        if (st == VarState::AtLower && d < -kDualTol) cand_dir = +1;
        else if (st == VarState::AtUpper && d > kDualTol) cand_dir = -1;
        else if (st == VarState::Free && std::abs(d) > kDualTol) cand_dir = (d < 0) ? +1 : -1;
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j; dir = cand_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      Eigen::VectorXd alpha = ftran(enter);
      // Ratio test: step t >= 0 moving x_enter by dir*t.
      double t_best = kInf;
      int leave_row = -1;
      double leave_piv = 0.0;
      bool leave_to_upper = false;
      if (is_finite(lo[enter]) && is_finite(up[enter])) t_best = up[enter] - lo[enter];
      for (int r = 0; r < m; ++r) {
        double rate = dir * alpha(r);  // x_B(r) decreases at this rate
        int k = basic[r];
        double t = kInf;
        bool to_upper = false;
        if (rate > kPivotTol) {
          if (is_finite(lo[k])) t = (xb(r) - lo[k]) / rate;
        } else if (rate < -kPivotTol) {
          if (is_finite(up[k])) { t = (xb(r) - up[k]) / rate; to_upper = true; }
        } else {
          continue;
        }
        if (!is_finite(t)) continue;
        if (t < 0) t = 0.0;  // tolerate slight infeasibility drift
        bool better;
        if (bland) {
          better = (t < t_best - 1e-12) ||
                   (t <= t_best + 1e-12 && leave_row >= 0 && k < basic[leave_row]) ||
                   (t <= t_best + 1e-12 && leave_row < 0);
        } else {
          better = (t < t_best - 1e-12) ||
                   (t <= t_best + 1e-12 && std::abs(alpha(r)) > std::abs(leave_piv));
        }
        if (better) {
          t_best = t;
          leave_row = r;
          leave_piv = alpha(r);
          leave_to_upper = to_upper;
        }
      }
      if (!is_finite(t_best)) return SolveStatus::Unbounded;

      if (t_best < 1e-11) {
        if (++stall > kStallLimit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      if (leave_row < 0) {
        // Bound flip: entering jumps to its opposite bound, basis unchanged.
        double t = t_best;
        xb.noalias() -= (dir * t) * alpha;
        state[enter] = (dir > 0) ? VarState::AtUpper : VarState::AtLower;
        nb_value[enter] = (dir > 0) ? up[enter] : lo[enter];
        continue;
      }

      double start = nb_value[enter];
      double enter_val = start + dir * t_best;
      int leaving = basic[leave_row];
      xb.noalias() -= (dir * t_best) * alpha;
      state[leaving] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      nb_value[leaving] = leave_to_upper ? up[leaving] : lo[leaving];
      pivot_update(leave_row, alpha);
      basic[leave_row] = enter;
      state[enter] = VarState::Basic;
      xb(leave_row) = enter_val;
    }
  }

  void sanity_refactor_if_drifting() {
    // Cheap residual check; refactor only when the explicit inverse drifted.
    Eigen::VectorXd r = rhs_minus_nonbasic();
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(m);
    for (int row = 0; row < m; ++row) {
      double v = xb(row);
      if (v == 0.0) continue;
      for (auto [i, a] : cols[basic[row]]) bx(i) += a * v;
    }
    double err = (bx - r).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(err) || err > 1e-8 * (1.0 + r.lpNorm<Eigen::Infinity>())) refactorize();
  }

  // Build the initial slack/artificial basis and run phase 1 if needed.
  // Returns false when infeasible.
  bool phase1() {
    const int total_before = num_vars();
    state.assign(total_before, VarState::AtLower);
    nb_value.assign(total_before, 0.0);
    for (int j = 0; j < total_before; ++j) {
      state[j] = nonbasic_start_state(j);
      nb_value[j] = nonbasic_start_value(j);
    }
    // Residual the slack must absorb.
    std::vector<double> resid(b.begin(), b.end());
    for (int j = 0; j < n_struct; ++j) {
      double v = nb_value[j];
      if (v == 0.0) continue;
      for (auto [i, a] : cols[j]) resid[i] -= a * v;
    }
    basic.assign(m, -1);
    std::vector<double> art_cost;
    bool need_phase1 = false;
    xb = Eigen::VectorXd::Zero(m);
    std::vector<double> diag(m, 1.0);
    for (int i = 0; i < m; ++i) {
      int s = n_struct + i;
      double v = resid[i];
      if (v >= lo[s] - kPrimalTol && v <= up[s] + kPrimalTol) {
        basic[i] = s;
        xb(i) = v;
        diag[i] = 1.0;
      } else {
        // Slack parks at its nearest bound; an artificial absorbs the rest.
        double sv = (v < lo[s]) ? lo[s] : up[s];
        state[s] = (sv == lo[s]) ? VarState::AtLower : VarState::AtUpper;
        nb_value[s] = sv;
        double rest = v - sv;
        double sgn = (rest >= 0) ? 1.0 : -1.0;
        int aidx = num_vars();
        cols.push_back({{i, sgn}});
        lo.push_back(0.0);
        up.push_back(kInf);
        cost.push_back(0.0);
        state.push_back(VarState::Basic);
        nb_value.push_back(0.0);
        basic[i] = aidx;
        xb(i) = std::abs(rest);
        diag[i] = sgn;
        need_phase1 = true;
      }
    }
    // Initial basis matrix is diagonal: slacks (+1) and artificials (+-1).
    binv = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) binv(i, i) = 1.0 / diag[i];
    for (int i = 0; i < m; ++i)
      if (basic[i] >= n_struct + n_slack) xb(i) = std::abs(xb(i));

    if (!need_phase1) return true;

    std::vector<double> c1(num_vars(), 0.0);
    for (int j = n_struct + n_slack; j < num_vars(); ++j) c1[j] = 1.0;
    SolveStatus st = primal(c1);
    if (st != SolveStatus::Optimal) throw std::runtime_error("simplex: phase 1 failed unexpectedly");
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (basic[r] >= n_struct + n_slack) infeas += std::max(0.0, xb(r));
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (infeas > kFeasTol * scale) return false;

    // Drive remaining zero artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (basic[r] < n_struct + n_slack) continue;
      Eigen::RowVectorXd row = binv.row(r);
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < n_struct + n_slack; ++j) {
        if (state[j] == VarState::Basic || lo[j] == up[j]) continue;
        double rho = 0.0;
        for (auto [i, a] : cols[j]) rho += row(i) * a;
        if (std::abs(rho) > std::max(1e-7, best)) {
          best = std::abs(rho);
          enter = j;
        }
      }
      if (enter < 0) continue;  // redundant row; artificial stays basic at zero
      Eigen::VectorXd alpha = ftran(enter);
      int old = basic[r];
      double enter_start = nb_value[enter];
      pivot_update(r, alpha);
      basic[r] = enter;
      state[old] = VarState::AtLower;
      nb_value[old] = 0.0;
      state[enter] = VarState::Basic;
      xb(r) = enter_start;  // degenerate pivot: values unchanged
    }
    // Artificials are done: pin them so they can never re-enter.
    for (int j = n_struct + n_slack; j < num_vars(); ++j) {
      lo[j] = 0.0;
      up[j] = 0.0;
      if (state[j] != VarState::Basic) {
        state[j] = VarState::AtLower;
        nb_value[j] = 0.0;
      }
    }
    return true;
  }

  LpSolution extract(SolveStatus st) {
    LpSolution sol;
    sol.status = st;
    if (st != SolveStatus::Optimal) {
      have_optimal_basis = false;
      return sol;
    }
    have_optimal_basis = true;
    sol.values.assign(n_struct, 0.0);
    std::vector<double> all(num_vars(), 0.0);
    for (int j = 0; j < num_vars(); ++j)
      if (state[j] != VarState::Basic) all[j] = nb_value[j];
    for (int r = 0; r < m; ++r) all[basic[r]] = xb(r);
    for (int j = 0; j < n_struct; ++j) {
      double v = all[j];
      // Snap tiny bound violations from the tolerance budget.
      if (is_finite(lo[j]) && v < lo[j]) v = (v > lo[j] - kFeasTol) ? lo[j] : v;
      if (is_finite(up[j]) && v > up[j]) v = (v < up[j] + kFeasTol) ? up[j] : v;
      sol.values[j] = v;
    }
    double obj = 0.0;
    for (int j = 0; j < n_struct; ++j) obj += cost[j] * sol.values[j];
    sol.objective_value = (model_sense == Sense::Maximize) ? -obj : obj;
    return sol;
  }

  LpSolution run() {
    iterations = 0;
    have_optimal_basis = false;
    if (!phase1()) return extract(SolveStatus::Infeasible);
    SolveStatus st = primal(cost);
    return extract(st);
  }

  // Dual simplex after an rhs change, warm-starting from the current basis.
  LpSolution rerun_dual(std::span<const double> new_rhs) {
    if (static_cast<int>(new_rhs.size()) != m)
      throw ModelError("resolve: rhs size does not match constraint count");
    for (int i = 0; i < m; ++i) {
      if (!is_finite(new_rhs[i])) throw ModelError("resolve: non-finite rhs");
      b[i] = new_rhs[i];
    }
    if (!have_optimal_basis) return run();
    have_optimal_basis = false;
    xb = binv * rhs_minus_nonbasic();

    bool bland = false;
    int stall = 0;
    double last_infeas = kInf;
    const long cap = 2000L * (m + num_vars()) + 20000;
    long iters = 0, since_check = 0;
    for (;;) {
      if (++iters > cap) throw std::runtime_error("simplex: dual iteration limit exceeded");
      if (++since_check >= 1024) {
        since_check = 0;
        sanity_refactor_if_drifting();
      }
      int row = -1;
      bool below = false;
      double worst = kPrimalTol;
      double total_infeas = 0.0;
      for (int r = 0; r < m; ++r) {
        int k = basic[r];
        double v = xb(r);
        double viol = 0.0;
        bool is_below = false;
        if (is_finite(lo[k]) && v < lo[k] - kPrimalTol) { viol = lo[k] - v; is_below = true; }
        else if (is_finite(up[k]) && v > up[k] + kPrimalTol) { viol = v - up[k]; }
        if (viol > 0) total_infeas += viol;
        if (bland) {
          if (viol > kPrimalTol && row < 0) { row = r; below = is_below; }
        } else if (viol > worst) {
          worst = viol;
          row = r;
          below = is_below;
        }
      }
      if (row < 0) {
        SolveStatus st = primal(cost);  // clean up any residual dual drift
        return extract(st);
      }
      if (total_infeas > last_infeas - 1e-12) {
        if (++stall > 2 * kStallLimit) bland = true;
      } else {
        stall = 0;
      }
      last_infeas = total_infeas;

      Eigen::RowVectorXd brow = binv.row(row);
      Eigen::VectorXd y = btran_costs(cost);
      int enter = -1;
      double best_ratio = kInf;
      double enter_rho = 0.0;
      for (int j = 0; j < num_vars(); ++j) {
        if (state[j] == VarState::Basic || lo[j] == up[j]) continue;
        double rho = 0.0;
        for (auto [i, a] : cols[j]) rho += brow(i) * a;
        if (std::abs(rho) <= kPivotTol) continue;
        bool eligible;
        if (below) {
          eligible = (state[j] == VarState::AtLower && rho < 0) ||
                     (state[j] == VarState::AtUpper && rho > 0) ||
                     state[j] == VarState::Free;
        } else {
          eligible = (state[j] == VarState::AtLower && rho > 0) ||
                     (state[j] == VarState::AtUpper && rho < 0) ||
                     state[j] == VarState::Free;
        }
        if (!eligible) continue;
        double d = reduced_cost(j, cost, y);
        double ratio = std::abs(d) / std::abs(rho);
        bool better = ratio < best_ratio - 1e-12 ||
                      (ratio <= best_ratio + 1e-12 &&
                       (bland ? (enter < 0 || j < enter) : std::abs(rho) > std::abs(enter_rho)));
        if (better) {
          best_ratio = ratio;
          enter = j;
          enter_rho = rho;
        }
      }
      if (enter < 0) return extract(SolveStatus::Infeasible);

      Eigen::VectorXd alpha = ftran(enter);
      int leaving = basic[row];
      double target = below ? lo[leaving] : up[leaving];
      double delta = (xb(row) - target) / alpha(row);
      double enter_start = nb_value[enter];
      xb.noalias() -= delta * alpha;
      pivot_update(row, alpha);
      basic[row] = enter;
      state[leaving] = below ? VarState::AtLower : VarState::AtUpper;
      nb_value[leaving] = target;
      state[enter] = VarState::Basic;
      xb(row) = enter_start + delta;
    }
  }
};

SimplexSolver::SimplexSolver(const LinearModel& model) : impl_(std::make_unique<Impl>(model)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve() { return impl_->run(); }

LpSolution SimplexSolver::resolve(std::span<const double> new_rhs) {
  return impl_->rerun_dual(new_rhs);
}

LpSolution solve_lp(const LinearModel& model) {
  SimplexSolver solver(model);
  return solver.solve();
}

void write_lp_format(const LinearModel& model, std::ostream& os) {
  auto term_str = [&](const Terms& ts) {
    std::ostringstream ss;
    bool first = true;
    for (auto [j, a] : ts) {
      if (a == 0.0) continue;
      if (first) {
        if (a < 0) ss << "- ";
      } else {
        ss << (a < 0 ? " - " : " + ");
      }
      double mag = std::abs(a);
      if (mag != 1.0) ss << mag << " ";
      ss << model.vars[j].name;
      first = false;
    }
    if (first) ss << "0";
    return ss.str();
  };
  os << (model.sense == Sense::Maximize ? "Maximize" : "Minimize") << "\n obj: "
     << term_str(model.objective) << "\nSubject To\n";
  for (std::size_t i = 0; i < model.cons.size(); ++i) {
    const auto& c = model.cons[i];
    const char* rel = c.rel == Rel::LessEq ? "<=" : (c.rel == Rel::Eq ? "=" : ">=");
    os << " c" << i << ": " << term_str(c.terms) << " " << rel << " " << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      os << " " << v.name << " free\n";
    } else if (v.upper == kInf) {
      os << " " << v.name << " >= " << v.lower << "\n";
    } else if (v.lower == -kInf) {
      os << " " << v.name << " <= " << v.upper << "\n";
    } else {
      os << " " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
    }
  }
  os << "End\n";
}

}  // namespace edgeplan::lp
