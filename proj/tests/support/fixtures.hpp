#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "stackfit/fitting.hpp"
#include "stackfit/rng.hpp"
#include "stackfit/synth.hpp"

namespace fixtures {

using stackfit::GeometricEllipse;
using stackfit::LayerPointSet;
using stackfit::Vec2;
using stackfit::Vec3;
using stackfit::Vec6;

inline std::vector<Vec2> circle_points(std::size_t n, Vec2 c = {0, 0}, double r = 1.0) {
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    pts.push_back({c[0] + r * std::cos(t), c[1] + r * std::sin(t)});
  }
  return pts;
}

inline std::vector<Vec2> ellipse_points(const GeometricEllipse& e, std::size_t n, std::uint64_t seed) {
  stackfit::Xorshift64Star rng(seed);
  return stackfit::sample_ellipse_points(e, n, 0.0, rng);
}

inline double theta_distance(const Vec6& a, const Vec6& b) {
  double s = 0.0;
  for (int i = 0; i < 6; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Ellipsoid slice stack with thinned polar layers.
struct PoleStack {
  Vec3 center{0.0, 0.0, 0.5};
  Vec3 axes{12.0, 9.0, 8.0};
  std::vector<LayerPointSet> layers;
  /// indices into layers of the thinned ones
  std::vector<std::size_t> sparse;

  /// Analytic cross-section of the layer.
  GeometricEllipse truth(const LayerPointSet& l) const {
    const auto s = stackfit::ellipsoid_cross_section(axes, l.layer_index - center[2]);
    return {{center[0], center[1]}, *s, 0.0};
  }
};

/// Ten layers z = -4..5 of an axis-aligned ellipsoid, jittered, with the two
/// top and two bottom layers cut down to `sparse_points` points on one arc.
inline PoleStack pole_stack(double jitter = 0.15, std::size_t sparse_points = 3, std::uint64_t seed = 7) {
  PoleStack ps;
  ps.layers = stackfit::synth_stack(ps.center, ps.axes, -4, 5, 40, jitter, seed);
  const std::size_t n = ps.layers.size();
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
    auto& pts = ps.layers[i].points;
    // keep points from a single half so the layer alone is poorly constrained
    std::vector<Vec2> kept;
    for (const auto& p : pts)
      if (p[1] >= ps.center[1] && kept.size() < sparse_points) kept.push_back(p);
    pts = kept;
    ps.sparse.push_back(i);
  }
  return ps;
}

/// Relative semi-axis error plus center offset in units of the larger axis;
/// infinite when there is no ellipse.
inline double geometric_error(const stackfit::LayerFit& fit, const GeometricEllipse& truth) {
  if (!fit.ellipse) return std::numeric_limits<double>::infinity();
  const auto& e = *fit.ellipse;
  const double big = std::max(truth.semi_axes[0], truth.semi_axes[1]);
  const double small = std::min(truth.semi_axes[0], truth.semi_axes[1]);
  const double dc = std::hypot(e.center[0] - truth.center[0], e.center[1] - truth.center[1]);
  return std::abs(e.semi_axes[0] - big) / big + std::abs(e.semi_axes[1] - small) / small + dc / big;
}

/// Exact minimum of sum_i max(|a u_i + v_i + f| - eps, 0) over (a, f), where
/// the slice is theta = [a, 0, 1 - a, 0, 0, f] so u = x^2 - y^2, v = y^2.
/// The function is convex piecewise linear; its minimum is attained at an
/// intersection of two breakpoint lines a u_i + f = +-eps - v_i.
struct SliceOracle {
  std::vector<Vec2> points;
  double eps = 0.0;

  double loss(double a, double f) const {
    double s = 0.0;
    for (const auto& p : points) {
      const double r = a * p[0] * p[0] + (1.0 - a) * p[1] * p[1] + f;
      s += std::max(std::abs(r) - eps, 0.0);
    }
    return s;
  }

  double vertex_minimum() const {
    std::vector<std::array<double, 3>> lines;  // u a + f = w
    for (const auto& p : points) {
      const double u = p[0] * p[0] - p[1] * p[1], v = p[1] * p[1];
      lines.push_back({u, 1.0, eps - v});
      lines.push_back({u, 1.0, -eps - v});
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const double det = lines[i][0] - lines[j][0];
        if (std::abs(det) < 1e-12) continue;
        const double a = (lines[i][2] - lines[j][2]) / det;
        const double f = lines[i][2] - lines[i][0] * a;
        best = std::min(best, loss(a, f));
      }
    }
    return best;
  }

  /// Dense grid over [-2, 3] x [-3, 2], refined three times around the best cell.
  double grid_minimum(int n = 401) const {
    double a0 = -2.0, a1 = 3.0, f0 = -3.0, f1 = 2.0;
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 4; ++round) {
      double ba = a0, bf = f0;
      for (int i = 0; i < n; ++i) {
        const double a = a0 + (a1 - a0) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
          const double f = f0 + (f1 - f0) * j / (n - 1);
          const double v = loss(a, f);
          if (v < best) {
            best = v;
            ba = a;
            bf = f;
          }
        }
      }
      const double ha = 4.0 * (a1 - a0) / (n - 1), hf = 4.0 * (f1 - f0) / (n - 1);
      a0 = ba - ha;
      a1 = ba + ha;
      f0 = bf - hf;
      f1 = bf + hf;
    }
    return best;
  }
};

/// Extra rows restricting theta to the (a, f) slice: b = d = e = 0.
inline std::vector<stackfit::ThetaEquality> slice_rows() {
  return {{{0, 1, 0, 0, 0, 0}, 0.0}, {{0, 0, 0, 1, 0, 0}, 0.0}, {{0, 0, 0, 0, 1, 0}, 0.0}};
}

}  // namespace fixtures
