#pragma once

#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace edgeplan::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Contract tolerances. Optimal solutions satisfy every constraint and bound
// within kFeasTol; reported optima are within kOptTol of the true optimum on
// desk-scale inputs.
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kOptTol = 1e-6;

enum class Rel { LessEq, Eq, GreaterEq };
enum class Sense { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, Unbounded };

// Malformed model (bad bounds, unknown variable, non-finite coefficient).
// Distinct from infeasibility, which is a valid solve outcome.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Terms = std::vector<std::pair<int, double>>;  // (variable index, coefficient)

struct LinearModel {
  struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
  };
  struct Constraint {
    Terms terms;
    Rel rel = Rel::LessEq;
    double rhs = 0.0;
  };

  std::vector<Variable> vars;
  std::vector<Constraint> cons;
  Sense sense = Sense::Minimize;
  Terms objective;

  int add_var(std::string name, double lower = 0.0, double upper = kInf);
  int add_constraint(Terms terms, Rel rel, double rhs);
  void set_objective(Sense s, Terms terms);

  int var_index(std::string_view name) const;

  // Throws ModelError on the first structural defect found.
  void validate() const;

 private:
  std::unordered_map<std::string, int> name_index_;
};

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;  // by variable index; empty unless Optimal
  double objective_value = 0.0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// Dense revised simplex with bounded variables. solve() runs a two-phase
// primal from a slack basis; resolve() re-optimizes after a pure right-hand
// side change with the dual simplex, warm-starting from the last basis.
// The model handed to the constructor is copied; a solver instance never
// mutates its model, and distinct instances are independent.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearModel& model);
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  LpSolution solve();

  // new_rhs.size() must equal the constraint count. Falls back to a cold
  // solve when no optimal basis is available.
  LpSolution resolve(std::span<const double> new_rhs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const LinearModel& model);

// CPLEX LP text format, for cross-checking against external solvers.
void write_lp_format(const LinearModel& model, std::ostream& os);

}  // namespace edgeplan::lp
