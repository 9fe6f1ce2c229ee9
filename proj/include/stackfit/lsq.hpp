#pragma once

#include <span>

#include "stackfit/conic.hpp"

namespace stackfit {

struct LinearGauge {
  Vec6 g{1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  double rhs = 1.0;
};

/// argmin sum_i (row_i . theta)^2  subject to  gauge.g . theta = gauge.rhs.
///
/// Solves the 7x7 Lagrangian stationarity system
///   [ 2 A^T A   g ] [theta]   [ 0  ]
///   [   g^T     0 ] [ mu  ] = [rhs ]
/// by Gaussian elimination with partial pivoting. Throws
/// Error(SingularSystem) when a pivot falls below pivot_tol relative to the
/// largest matrix entry (e.g. collinear points), Error(InvalidInput) for
/// fewer than five rows or a zero gauge.
Vec6 solve_linear_eq_constrained_lsq(std::span<const Vec6> rows, const LinearGauge& gauge = {},
                                     double pivot_tol = 1e-12);

}  // namespace stackfit
