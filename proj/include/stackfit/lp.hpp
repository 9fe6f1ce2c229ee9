#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace stackfit::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LE, EQ };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LE;
  double rhs = 0.0;
};

struct Bounds {
  double lower = 0.0;
  double upper = kInf;
};

/// minimize objective . x  subject to constraints and per-variable bounds.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;

  explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(n, 0.0), bounds(n) {}

  /// Appends a row; the caller fills coeffs (sized num_vars).
  Constraint& add_row(Relation rel, double rhs);

  /// Throws Error(InvalidInput) on ragged rows, NaNs or lower > upper.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIterations };

std::string to_string(Status s);

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> x;        // empty unless Optimal
  double objective_value = 0.0;  // meaningful only when Optimal
  std::size_t iterations = 0;
};

struct SolverConfig {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-10;
  /// Reduced costs above -opt_tol * max(1, max |objective|) count as optimal.
  double opt_tol = 1e-9;
  /// Relative right-hand-side perturbation applied while pivoting (removed
  /// before a phase ends). 0 disables it.
  double perturbation = 1e-7;
  /// 0 selects 50 * (columns + rows) of the standard form.
  std::size_t max_iterations = 0;
  bool anti_cycling = true;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  std::size_t degenerate_pivot_limit = 50;
};

/// How each original variable is recovered from standard-form columns:
/// x = offset + sign * x[pos] - x[neg] (neg absent unless the variable is free).
struct VariableMap {
  std::size_t pos = 0;
  std::ptrdiff_t neg = -1;
  double offset = 0.0;
  double sign = 1.0;
};

struct StandardForm {
  LinearProgram lp;  // EQ rows only, every variable in [0, inf)
  std::vector<VariableMap> vars;
  std::size_t num_slacks = 0;

  std::vector<double> recover(const std::vector<double>& standard_x) const;
};

StandardForm to_standard_form(const LinearProgram& lp);

/// Two-phase dense tableau primal simplex. Dantzig pricing, switching to
/// Bland's rule after cfg.degenerate_pivot_limit consecutive degenerate
/// pivots when anti_cycling is on.
LpSolution solve(const LinearProgram& lp, const SolverConfig& cfg = {});

/// Constraints and bounds hold within tol * (1 + |rhs|), and the reported
/// objective matches objective . x within tol * (1 + |objective . x|).
bool verify_solution(const LinearProgram& lp, const LpSolution& sol, double tol);

/// CPLEX-LP text (Minimize / Subject To / Bounds / End). Variables are named
/// x1..xn, rows c1..cm. Grammar documented in docs/lp_format.md.
void write_cplex_lp(const LinearProgram& lp, std::ostream& out);
std::string to_cplex_lp(const LinearProgram& lp);

}  // namespace stackfit::lp
