#include "stackfit/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "stackfit/error.hpp"

namespace stackfit {

Vec6 solve_linear_eq_constrained_lsq(std::span<const Vec6> rows, const LinearGauge& gauge,
                                     double pivot_tol) {
  if (rows.size() < 5) {
    throw Error(ErrorCode::InvalidInput, "constrained conic least squares needs at least 5 rows");
  }
  if (std::all_of(gauge.g.begin(), gauge.g.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorCode::InvalidInput, "gauge vector is zero");
  }

  constexpr int N = 7;
  double k[N][N + 1] = {};
  for (const Vec6& r : rows) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) k[i][j] += 2.0 * r[i] * r[j];
    }
  }
  for (int i = 0; i < 6; ++i) {
    k[i][6] = gauge.g[i];
    k[6][i] = gauge.g[i];
  }
  k[6][N] = gauge.rhs;

  double largest = 0.0;
  for (auto& row : k) {
    for (int j = 0; j < N; ++j) largest = std::max(largest, std::abs(row[j]));
  }

  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int i = col + 1; i < N; ++i) {
      if (std::abs(k[i][col]) > std::abs(k[piv][col])) piv = i;
    }
    if (!(std::abs(k[piv][col]) > pivot_tol * largest)) {
      throw Error(ErrorCode::SingularSystem, "rank-deficient normal system (degenerate points)");
    }
    if (piv != col) {
      for (int j = 0; j <= N; ++j) std::swap(k[piv][j], k[col][j]);
    }
    for (int i = col + 1; i < N; ++i) {
      const double factor = k[i][col] / k[col][col];
      if (factor == 0.0) continue;
      for (int j = col; j <= N; ++j) k[i][j] -= factor * k[col][j];
    }
  }

  double sol[N];
  for (int i = N - 1; i >= 0; --i) {
    double acc = k[i][N];
    for (int j = i + 1; j < N; ++j) acc -= k[i][j] * sol[j];
    sol[i] = acc / k[i][i];
  }
  return {sol[0], sol[1], sol[2], sol[3], sol[4], sol[5]};
}

}  // namespace stackfit
