#include "lp_oracle.hpp"

#include <cmath>
#include <limits>

namespace oracle {

using stackfit::lp::LinearProgram;
using stackfit::lp::Relation;

std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> M, std::vector<double> r) {
  const std::size_t n = r.size();
  double scale = 0.0;
  for (const auto& row : M)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(M[i][k]) > std::abs(M[p][k])) p = i;
    if (std::abs(M[p][k]) <= 1e-11 * std::max(scale, 1.0)) return std::nullopt;
    std::swap(M[p], M[k]);
    std::swap(r[p], r[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = M[i][k] / M[k][k];
      for (std::size_t j = k; j < n; ++j) M[i][j] -= f * M[k][j];
      r[i] -= f * r[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = r[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= M[k][j] * x[j];
    x[k] = s / M[k][k];
  }
  return x;
}

namespace {

struct Std {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> c;
  // original x_j = offset_j + sum_k coef * z_k
  std::vector<std::vector<std::pair<std::size_t, double>>> recover;
  std::vector<double> offset;
};

Std build(const LinearProgram& lp) {
  Std s;
  const std::size_t n = lp.num_vars;
  s.recover.resize(n);
  s.offset.assign(n, 0.0);
  std::size_t cols = 0;
  std::vector<std::pair<std::size_t, double>> upper;  // (column, width)
  for (std::size_t j = 0; j < n; ++j) {
    const auto& bd = lp.bounds[j];
    if (std::isfinite(bd.lower)) {
      s.offset[j] = bd.lower;
      s.recover[j].push_back({cols, 1.0});
      if (std::isfinite(bd.upper)) upper.push_back({cols, bd.upper - bd.lower});
      ++cols;
    } else if (std::isfinite(bd.upper)) {
      s.offset[j] = bd.upper;
      s.recover[j].push_back({cols++, -1.0});
    } else {
      s.recover[j].push_back({cols++, 1.0});
      s.recover[j].push_back({cols++, -1.0});
    }
  }
  std::size_t slack_count = upper.size();
  for (const auto& row : lp.constraints) slack_count += row.relation == Relation::LE;
  const std::size_t total = cols + slack_count;
  s.c.assign(total, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (auto [k, coef] : s.recover[j]) s.c[k] += coef * lp.objective[j];
  std::size_t slack = cols;
  for (const auto& row : lp.constraints) {
    std::vector<double> a(total, 0.0);
    double rhs = row.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      for (auto [k, coef] : s.recover[j]) a[k] += coef * row.coeffs[j];
      rhs -= row.coeffs[j] * s.offset[j];
    }
    if (row.relation == Relation::LE) a[slack++] = 1.0;
    s.A.push_back(a);
    s.b.push_back(rhs);
  }
  for (auto [k, w] : upper) {
    std::vector<double> a(total, 0.0);
    a[k] = 1.0;
    a[slack++] = 1.0;
    s.A.push_back(a);
    s.b.push_back(w);
  }
  return s;
}

// Row-reduces [A | b] and drops dependent rows. Returns false when a
// dependent row is inconsistent (0 = nonzero).
bool reduce_rows(std::vector<std::vector<double>>& A, std::vector<double>& b) {
  const std::size_t m = A.size();
  if (m == 0) return true;
  const std::size_t N = A[0].size();
  double scale = 1.0;
  for (const auto& row : A)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tol = 1e-10 * scale;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < N && rank < m; ++col) {
    std::size_t p = rank;
    for (std::size_t i = rank + 1; i < m; ++i)
      if (std::abs(A[i][col]) > std::abs(A[p][col])) p = i;
    if (std::abs(A[p][col]) <= tol) continue;
    std::swap(A[p], A[rank]);
    std::swap(b[p], b[rank]);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == rank) continue;
      const double f = A[i][col] / A[rank][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < N; ++j) A[i][j] -= f * A[rank][j];
      b[i] -= f * b[rank];
    }
    ++rank;
  }
  for (std::size_t i = rank; i < m; ++i)
    if (std::abs(b[i]) > 1e-9 * (1.0 + scale)) return false;
  A.resize(rank);
  b.resize(rank);
  return true;
}

// Minimum of c.x over basic feasible solutions of A x = b, x >= 0.
std::optional<std::pair<double, std::vector<double>>> best_bfs(std::vector<std::vector<double>> A,
                                                               std::vector<double> b,
                                                               const std::vector<double>& c, double tol) {
  if (!reduce_rows(A, b)) return std::nullopt;
  const std::size_t m = A.size();
  const std::size_t N = c.size();
  std::optional<std::pair<double, std::vector<double>>> best;
  if (m == 0) {
    // Only x = 0 is basic.
    return std::make_pair(0.0, std::vector<double>(N, 0.0));
  }
  if (m > N) return std::nullopt;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    std::vector<std::vector<double>> M(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) M[i][k] = A[i][idx[k]];
    if (auto xb = solve_square(M, b)) {
      bool feasible = true;
      for (double v : *xb) feasible = feasible && v >= -tol * (1.0 + std::abs(v));
      if (feasible) {
        std::vector<double> x(N, 0.0);
        double obj = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          x[idx[k]] = std::max((*xb)[k], 0.0);
          obj += c[idx[k]] * x[idx[k]];
        }
        if (!best || obj < best->first) best = std::make_pair(obj, x);
      }
    }
    // next combination
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == N - m + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < m; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

}  // namespace

Result enumerate_lp(const LinearProgram& lp, double tol) {
  const Std s = build(lp);
  Result res;
  const auto opt = best_bfs(s.A, s.b, s.c, tol);
  if (!opt) {
    res.verdict = Verdict::Infeasible;
    return res;
  }
  auto ray_A = s.A;
  std::vector<double> ray_b(s.A.size(), 0.0);
  ray_A.push_back(std::vector<double>(s.c.size(), 1.0));
  ray_b.push_back(1.0);
  const auto ray = best_bfs(ray_A, ray_b, s.c, tol);
  if (ray && ray->first < -1e-9) {
    res.verdict = Verdict::Unbounded;
    return res;
  }
  res.verdict = Verdict::Optimal;
  res.x.assign(lp.num_vars, 0.0);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    res.x[j] = s.offset[j];
    for (auto [k, coef] : s.recover[j]) res.x[j] += coef * opt->second[k];
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) res.objective += lp.objective[j] * res.x[j];
  return res;
}

}  // namespace oracle
