#include "stackfit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "stackfit/error.hpp"
#include "stackfit/kernels.hpp"

namespace stackfit::lp {

Constraint& LinearProgram::add_row(Relation rel, double rhs) {
  constraints.push_back(Constraint{std::vector<double>(num_vars, 0.0), rel, rhs});
  return constraints.back();
}

void LinearProgram::validate() const {
  if (objective.size() != num_vars || bounds.size() != num_vars) {
    throw Error(ErrorCode::InvalidInput, "objective/bounds length differs from num_vars");
  }
  for (double c : objective) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidInput, "non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& row = constraints[i];
    if (row.coeffs.size() != num_vars) {
      throw Error(ErrorCode::InvalidInput, "constraint " + std::to_string(i) + " has wrong length");
    }
    if (!std::isfinite(row.rhs)) throw Error(ErrorCode::InvalidInput, "non-finite rhs");
    for (double v : row.coeffs) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite coefficient");
    }
  }
  for (const auto& b : bounds) {
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper || b.lower == kInf ||
        b.upper == -kInf) {
      throw Error(ErrorCode::InvalidInput, "invalid variable bounds");
    }
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

std::vector<double> StandardForm::recover(const std::vector<double>& standard_x) const {
  std::vector<double> x(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& m = vars[j];
    double v = m.offset + m.sign * standard_x[m.pos];
    if (m.neg >= 0) v -= standard_x[static_cast<std::size_t>(m.neg)];
    x[j] = v;
  }
  return x;
}

StandardForm to_standard_form(const LinearProgram& lp) {
  lp.validate();
  StandardForm sf;
  sf.vars.resize(lp.num_vars);

  // Columns for the original variables first.
  std::size_t ncols = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, width) for finite ranges
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const auto [lo, hi] = lp.bounds[j];
    auto& m = sf.vars[j];
    if (std::isfinite(lo)) {
      m = {ncols++, -1, lo, 1.0};
      if (std::isfinite(hi)) upper_rows.emplace_back(m.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      m = {ncols++, -1, hi, -1.0};
    } else {
      m.pos = ncols++;
      m.neg = static_cast<std::ptrdiff_t>(ncols++);
      m.offset = 0.0;
      m.sign = 1.0;
    }
  }
  const std::size_t structural = ncols;

  std::size_t slacks = upper_rows.size();
  for (const auto& row : lp.constraints) slacks += row.relation == Relation::LE ? 1 : 0;
  const std::size_t total = structural + slacks;

  LinearProgram out(total);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const auto& m = sf.vars[j];
    out.objective[m.pos] += m.sign * lp.objective[j];
    if (m.neg >= 0) out.objective[static_cast<std::size_t>(m.neg)] -= lp.objective[j];
  }

  std::size_t next_slack = structural;
  for (const auto& row : lp.constraints) {
    auto& r = out.add_row(Relation::EQ, row.rhs);
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      const double a = row.coeffs[j];
      if (a == 0.0) continue;
      const auto& m = sf.vars[j];
      r.coeffs[m.pos] += m.sign * a;
      if (m.neg >= 0) r.coeffs[static_cast<std::size_t>(m.neg)] -= a;
      r.rhs -= a * m.offset;
    }
    if (row.relation == Relation::LE) r.coeffs[next_slack++] = 1.0;
  }
  for (const auto& [col, width] : upper_rows) {
    auto& r = out.add_row(Relation::EQ, width);
    r.coeffs[col] = 1.0;
    r.coeffs[next_slack++] = 1.0;
  }

  sf.lp = std::move(out);
  sf.num_slacks = slacks;
  return sf;
}

namespace {

// Dense tableau. Column 0 holds the right-hand side, columns 1..n the
// standard-form variables, then one column per artificial. Rows 0..m-1 are
// constraints, row m the phase-2 reduced costs, row m+1 the phase-1 ones.
// Cost rows keep -z in column 0.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : w_(cols), data_((rows + 2) * cols, 0.0) {}

  std::span<double> row(std::size_t i) { return {data_.data() + i * w_, w_}; }
  double& at(std::size_t i, std::size_t j) { return data_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * w_ + j]; }

  // Pivot on (r, c), updating rows [0, last_row]. Rows with a zero factor
  // are skipped. A sparse pivot row is applied through its nonzero indices,
  // a dense one over its nonzero span with the vector kernel; both round
  // the same way.
  void pivot(std::size_t r, std::size_t c, std::size_t last_row) {
    auto prow = row(r);
    kernels::scale(1.0 / prow[c], prow);
    prow[c] = 1.0;
    nz_.clear();
    for (std::size_t j = 0; j < w_; ++j)
      if (prow[j] != 0.0) nz_.push_back(j);
    const std::size_t lo = nz_.front();
    const std::size_t hi = nz_.back() + 1;
    const bool sparse = 4 * nz_.size() < hi - lo;
    const auto src = std::span<const double>(prow.data() + lo, hi - lo);
    for (std::size_t i = 0; i <= last_row; ++i) {
      if (i == r) continue;
      double* ri = data_.data() + i * w_;
      const double factor = ri[c];
      if (factor == 0.0) continue;
      if (sparse) {
        const double a = -factor;
        for (std::size_t j : nz_) ri[j] += a * prow[j];
      } else {
        kernels::axpy(-factor, src, std::span<double>(ri + lo, hi - lo));
      }
      ri[c] = 0.0;
    }
  }

 private:
  std::size_t w_;
  std::vector<double> data_;
  std::vector<std::size_t> nz_;
};

enum class Outcome { Optimal, Unbounded, Infeasible, MaxIterations };

// Deterministic value in [0.5, 1) per row, used to spread the perturbation.
double spread(std::size_t i) {
  std::uint64_t z = i + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return 0.5 + 0.5 * static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Two-phase primal simplex on a dense tableau. The right-hand side is
// perturbed while pivoting to break degeneracy; at the end of each phase the
// true values are recomputed through the basis inverse (kept in the columns
// of the initial identity basis) and any resulting infeasibility is removed
// with dual simplex pivots. Reduced costs are recomputed from the original
// data before a phase is declared optimal.
class Simplex {
 public:
  Simplex(const LinearProgram& s, std::size_t num_slacks, const SolverConfig& cfg)
      : s_(s), cfg_(cfg), m_(s.constraints.size()), n_(s.num_vars) {
    sign_.assign(m_, 1.0);
    b_.assign(m_, 0.0);
    cols_.resize(n_ + 1);
    std::vector<std::size_t> nnz(n_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = s.constraints[i];
      if (row.rhs < 0.0) sign_[i] = -1.0;
      b_[i] = sign_[i] * row.rhs;
      for (std::size_t j = 0; j < n_; ++j) {
        if (row.coeffs[j] != 0.0) {
          cols_[1 + j].emplace_back(i, sign_[i] * row.coeffs[j]);
          ++nnz[j];
        }
      }
    }
    // A slack appearing only in this row with +1 starts basic; other rows get an artificial.
    init_col_.assign(m_, 0);
    const std::size_t first_slack = n_ - num_slacks;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = first_slack; j < n_; ++j) {
        if (nnz[j] == 1 && s.constraints[i].coeffs[j] * sign_[i] == 1.0) {
          init_col_[i] = 1 + j;
          break;
        }
      }
    }
    std::size_t next_art = 1 + n_;
    for (auto& c : init_col_) {
      if (c == 0) c = next_art++;
    }
    width_ = next_art;
    num_art_ = width_ - 1 - n_;

    t_ = Tableau(m_, width_);
    basis_ = init_col_;
    row_active_.assign(m_, true);
    for (std::size_t i = 0; i < m_; ++i) {
      auto r = t_.row(i);
      r[0] = b_[i];
      if (init_col_[i] > n_) r[init_col_[i]] = 1.0;
    }
    for (std::size_t j = 1; j <= n_; ++j) {
      for (const auto& [i, v] : cols_[j]) t_.at(i, j) = v;
    }
    max_iter_ = cfg.max_iterations > 0 ? cfg.max_iterations : 50 * (n_ + m_ + 1);
    for (double c : s.objective) cost_scale_ = std::max(cost_scale_, std::abs(c));
  }

  LpSolution solve() {
    LpSolution sol;
    if (num_art_ > 0) {
      const Outcome o = phase(kPhase1);
      sol.iterations = iterations_;
      if (o == Outcome::MaxIterations) {
        sol.status = Status::MaxIterations;
        return sol;
      }
      double rhs_scale = 1.0;
      for (double v : b_) rhs_scale = std::max(rhs_scale, std::abs(v));
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] > n_) infeasibility += std::abs(t_.at(i, 0));
      }
      if (o != Outcome::Optimal || infeasibility > cfg_.feas_tol * rhs_scale) {
        sol.status = Status::Infeasible;
        return sol;
      }
      drive_out_artificials();
    }

    const Outcome o = phase(kPhase2);
    sol.iterations = iterations_;
    switch (o) {
      case Outcome::MaxIterations:
        sol.status = Status::MaxIterations;
        return sol;
      case Outcome::Unbounded:
        sol.status = Status::Unbounded;
        return sol;
      case Outcome::Infeasible:
        sol.status = Status::Infeasible;
        return sol;
      case Outcome::Optimal:
        break;
    }
    std::vector<double> xs(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] <= n_) xs[basis_[i] - 1] = std::max(t_.at(i, 0), 0.0);
    }
    sol.status = Status::Optimal;
    sol.x = std::move(xs);
    return sol;
  }

 private:
  static constexpr int kPhase1 = 1;
  static constexpr int kPhase2 = 2;

  std::size_t cost_row(int phase) const { return phase == kPhase1 ? m_ + 1 : m_; }
  double cost_of(int phase, std::size_t col) const {
    if (phase == kPhase1) return col > n_ ? 1.0 : 0.0;
    return col <= n_ ? s_.objective[col - 1] : 0.0;
  }

  Outcome phase(int ph) {
    recompute_costs(ph);
    perturb();
    for (int round = 0; round < 8; ++round) {
      Outcome o = primal(ph);
      if (o == Outcome::MaxIterations) return o;
      restore_rhs();
      recompute_costs(ph);
      const Outcome d = dual(ph);
      if (d != Outcome::Optimal) return d;
      if (o == Outcome::Unbounded) {
        // Confirm on the restored tableau.
        o = primal(ph);
        if (o != Outcome::Optimal) return o;
        restore_rhs();
        recompute_costs(ph);
      }
      if (entering(ph, false) == 0) return Outcome::Optimal;
    }
    return Outcome::Optimal;
  }

  void perturb() {
    if (!(cfg_.perturbation > 0.0)) return;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!row_active_[i]) continue;
      double& v = t_.at(i, 0);
      v = std::max(v, 0.0) + cfg_.perturbation * (1.0 + std::abs(v)) * spread(i);
    }
  }

  // x_B = B^-1 b with B^-1 read from the initial-basis columns.
  void restore_rhs() {
    for (std::size_t i = 0; i < m_; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m_; ++k) acc += t_.at(i, init_col_[k]) * b_[k];
      t_.at(i, 0) = acc;
    }
  }

  // d_j = c_j - y . A_j with y = c_B B^-1.
  void recompute_costs(int ph) {
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_of(ph, basis_[i]);
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * t_.at(i, init_col_[k]);
    }
    auto cost = t_.row(cost_row(ph));
    for (std::size_t j = 1; j <= n_; ++j) {
      double d = cost_of(ph, j);
      for (const auto& [k, v] : cols_[j]) d -= y[k] * v;
      cost[j] = d;
    }
    for (std::size_t k = 0; k < m_; ++k) {
      if (init_col_[k] > n_) cost[init_col_[k]] = cost_of(ph, init_col_[k]) - y[k];
    }
    double z = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      cost[basis_[i]] = 0.0;
      z += cost_of(ph, basis_[i]) * t_.at(i, 0);
    }
    cost[0] = -z;
  }

  std::size_t entering(int ph, bool bland) {
    const auto cost = t_.row(cost_row(ph));
    std::size_t enter = 0;
    double best = -cfg_.opt_tol * (ph == kPhase1 ? 1.0 : cost_scale_);
    for (std::size_t j = 1; j <= n_; ++j) {
      if (cost[j] < best) {
        enter = j;
        if (bland) break;
        best = cost[j];
      }
    }
    return enter;
  }

  // Textbook minimum ratio, ties to the smallest basic column index.
  std::size_t ratio_test_bland(std::size_t enter) const {
    std::size_t leave = m_;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!row_active_[i]) continue;
      const double a = t_.at(i, enter);
      if (a <= cfg_.pivot_tol) continue;
      const double ratio = std::max(t_.at(i, 0), 0.0) / a;
      const double tie = 1e-12 * (1.0 + best_ratio);
      if (leave == m_ || ratio < best_ratio - tie) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + tie && basis_[i] < basis_[leave]) {
        leave = i;
        best_ratio = std::min(ratio, best_ratio);
      }
    }
    return leave;
  }

  // Harris two-pass test: bound the step using values relaxed by feas_tol,
  // then take the largest pivot among rows within that bound.
  std::size_t ratio_test_harris(std::size_t enter) const {
    double bound = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!row_active_[i]) continue;
      const double a = t_.at(i, enter);
      if (a <= cfg_.pivot_tol) continue;
      bound = std::min(bound, (std::max(t_.at(i, 0), 0.0) + cfg_.feas_tol) / a);
    }
    std::size_t leave = m_;
    double best_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!row_active_[i]) continue;
      const double a = t_.at(i, enter);
      if (a <= cfg_.pivot_tol) continue;
      if (std::max(t_.at(i, 0), 0.0) / a <= bound && a > best_pivot) {
        leave = i;
        best_pivot = a;
      }
    }
    return leave;
  }

  void do_pivot(std::size_t r, std::size_t c) {
    t_.pivot(r, c, m_ + 1);
    basis_[r] = c;
    ++iterations_;
  }

  Outcome primal(int ph) {
    bool bland = false;
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= max_iter_) return Outcome::MaxIterations;
      const std::size_t enter = entering(ph, bland);
      if (enter == 0) return Outcome::Optimal;
      const std::size_t leave = bland ? ratio_test_bland(enter) : ratio_test_harris(enter);
      if (leave == m_) return Outcome::Unbounded;
      const double step = std::max(t_.at(leave, 0), 0.0) / t_.at(leave, enter);
      if (step <= cfg_.feas_tol) {
        if (cfg_.anti_cycling && ++degenerate_run >= cfg_.degenerate_pivot_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      do_pivot(leave, enter);
    }
  }

  // Dual simplex pivots until every basic value is >= -feas_tol. Reduced
  // costs are assumed (near) optimal and stay so.
  Outcome dual(int ph) {
    const auto cost = t_.row(cost_row(ph));
    while (true) {
      if (iterations_ >= max_iter_) return Outcome::MaxIterations;
      std::size_t r = m_;
      double worst = -cfg_.feas_tol;
      for (std::size_t i = 0; i < m_; ++i) {
        if (row_active_[i] && t_.at(i, 0) < worst) {
          worst = t_.at(i, 0);
          r = i;
        }
      }
      if (r == m_) return Outcome::Optimal;
      std::size_t enter = 0;
      double best_ratio = kInf;
      double best_pivot = 0.0;
      for (std::size_t j = 1; j <= n_; ++j) {
        const double a = t_.at(r, j);
        if (a >= -cfg_.pivot_tol) continue;
        const double ratio = std::max(cost[j], 0.0) / -a;
        if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && -a > best_pivot)) {
          enter = j;
          best_ratio = std::min(ratio, best_ratio);
          best_pivot = -a;
        }
      }
      if (enter == 0) return Outcome::Infeasible;
      do_pivot(r, enter);
    }
  }

  // After phase 1, swap zero-valued artificials for structural columns;
  // rows where no such column exists are redundant.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] <= n_) continue;
      std::size_t col = 0;
      double best = cfg_.pivot_tol;
      for (std::size_t j = 1; j <= n_; ++j) {
        if (std::abs(t_.at(i, j)) > best) {
          best = std::abs(t_.at(i, j));
          col = j;
        }
      }
      if (col == 0) {
        row_active_[i] = false;
        continue;
      }
      t_.at(i, 0) = 0.0;
      do_pivot(i, col);
    }
  }

  const LinearProgram& s_;
  const SolverConfig& cfg_;
  std::size_t m_;
  std::size_t n_;
  std::size_t width_ = 0;
  std::size_t num_art_ = 0;
  double cost_scale_ = 1.0;  // optimality tolerance is relative to the largest cost
  std::vector<double> sign_;
  std::vector<double> b_;
  std::vector<std::vector<std::pair<std::size_t, double>>> cols_;  // sparse columns 1..n
  std::vector<std::size_t> init_col_;
  std::vector<std::size_t> basis_;
  std::vector<bool> row_active_;
  Tableau t_{0, 0};
  std::size_t iterations_ = 0;
  std::size_t max_iter_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverConfig& cfg) {
  if (!(cfg.feas_tol > 0.0) || !(cfg.pivot_tol > 0.0) || !(cfg.opt_tol > 0.0) || cfg.perturbation < 0.0) {
    throw Error(ErrorCode::InvalidInput, "solver tolerances must be positive");
  }
  const StandardForm sf = to_standard_form(lp);
  Simplex simplex(sf.lp, sf.num_slacks, cfg);
  LpSolution sol = simplex.solve();
  if (sol.status != Status::Optimal) return sol;
  sol.x = sf.recover(sol.x);
  double obj = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) obj += lp.objective[j] * sol.x[j];
  sol.objective_value = obj;
  return sol;
}

bool verify_solution(const LinearProgram& lp, const LpSolution& sol, double tol) {
  if (sol.status != Status::Optimal || sol.x.size() != lp.num_vars) return false;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const double v = sol.x[j];
    if (!std::isfinite(v)) return false;
    const auto& b = lp.bounds[j];
    if (std::isfinite(b.lower) && v < b.lower - tol * (1.0 + std::abs(b.lower))) return false;
    if (std::isfinite(b.upper) && v > b.upper + tol * (1.0 + std::abs(b.upper))) return false;
  }
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) lhs += row.coeffs[j] * sol.x[j];
    const double slack = tol * (1.0 + std::abs(row.rhs));
    if (row.relation == Relation::LE && lhs > row.rhs + slack) return false;
    if (row.relation == Relation::EQ && std::abs(lhs - row.rhs) > slack) return false;
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) obj += lp.objective[j] * sol.x[j];
  return std::abs(obj - sol.objective_value) <= tol * (1.0 + std::abs(obj));
}

}  // namespace stackfit::lp
