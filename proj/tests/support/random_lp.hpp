#pragma once

#include <cmath>

#include "stackfit/lp.hpp"
#include "stackfit/rng.hpp"

namespace oracle {

/// Small dense LP: 1..6 variables, 0..6 rows (at most two equalities), mixed
/// bounds. Most instances are feasible by construction (rows hold at a random
/// point), some are made degenerate (rows tight at that point), the rest get
/// arbitrary right-hand sides.
inline stackfit::lp::LinearProgram random_lp(stackfit::Xorshift64Star& rng) {
  using namespace stackfit::lp;
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6);
  const std::size_t m = static_cast<std::size_t>(rng.uniform() * 7);
  LinearProgram lp(n);
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = rng.uniform(-3.0, 3.0);
    const double kind = rng.uniform();
    if (kind < 0.65) {
      lp.bounds[j] = {0.0, kInf};
      x0[j] = rng.uniform(0.0, 2.0);
    } else if (kind < 0.75) {
      lp.bounds[j] = {-kInf, kInf};
      x0[j] = rng.uniform(-2.0, 2.0);
    } else if (kind < 0.9) {
      const double lo = rng.uniform(-2.0, 1.0);
      lp.bounds[j] = {lo, lo + rng.uniform(0.5, 3.0)};
      x0[j] = rng.uniform(lo, lp.bounds[j].upper);
    } else {
      const double hi = rng.uniform(-1.0, 2.0);
      lp.bounds[j] = {-kInf, hi};
      x0[j] = hi - rng.uniform(0.0, 2.0);
    }
  }
  const double mode = rng.uniform();
  std::size_t eq_rows = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool eq = eq_rows < 2 && rng.uniform() < 0.2;
    eq_rows += eq;
    auto& row = lp.add_row(eq ? Relation::EQ : Relation::LE, 0.0);
    double at_x0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row.coeffs[j] = rng.uniform() < 0.2 ? 0.0 : rng.uniform(-4.0, 4.0);
      at_x0 += row.coeffs[j] * x0[j];
    }
    if (mode < 0.6) {
      row.rhs = eq ? at_x0 : at_x0 + rng.uniform(0.0, 2.0);
    } else if (mode < 0.8) {
      row.rhs = at_x0;  // every row tight at x0
    } else {
      row.rhs = rng.uniform(-3.0, 3.0);
    }
  }
  return lp;
}

}  // namespace oracle
