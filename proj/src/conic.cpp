#include "stackfit/conic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stackfit/error.hpp"

namespace stackfit {

bool ConicParams::valid() const {
  bool nonzero = false;
  for (double v : theta) {
    if (!std::isfinite(v)) return false;
    nonzero = nonzero || v != 0.0;
  }
  return nonzero;
}

bool ConicParams::is_normalized(double tol) const {
  return std::abs(theta[0] + theta[2] - 1.0) <= tol;
}

std::optional<ConicParams> ConicParams::normalized() const {
  const double trace = theta[0] + theta[2];
  double largest = 0.0;
  for (double v : theta) largest = std::max(largest, std::abs(v));
  if (!(std::abs(trace) > 1e-12 * largest) || !std::isfinite(trace)) return std::nullopt;
  ConicParams out = *this;
  for (double& v : out.theta) v /= trace;
  return out;
}

bool GeometricEllipse::valid() const {
  return std::isfinite(center[0]) && std::isfinite(center[1]) && std::isfinite(rotation) &&
         semi_axes[0] > 0.0 && semi_axes[1] > 0.0 && std::isfinite(semi_axes[0]) &&
         std::isfinite(semi_axes[1]);
}

Vec2 AffineMap2D::apply(const Vec2& p) const {
  return {scale[0] * p[0] + offset[0], scale[1] * p[1] + offset[1]};
}

AffineMap2D AffineMap2D::inverse() const {
  return {{1.0 / scale[0], 1.0 / scale[1]}, {-offset[0] / scale[0], -offset[1] / scale[1]}};
}

bool AffineMap2D::invertible() const {
  return scale[0] != 0.0 && scale[1] != 0.0 && std::isfinite(scale[0]) &&
         std::isfinite(scale[1]) && std::isfinite(offset[0]) && std::isfinite(offset[1]);
}

Vec6 lift_point(const Vec2& p) {
  const double x = p[0];
  const double y = p[1];
  return {x * x, x * y, y * y, x, y, 1.0};
}

double algebraic_distance(const ConicParams& theta, const Vec2& p) {
  const Vec6 z = lift_point(p);
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) acc += z[i] * theta.theta[i];
  return acc;
}

bool is_ellipse(const ConicParams& theta) { return theta.discriminant() < 0.0; }

ConicParams geometric_to_conic(const GeometricEllipse& e) {
  const double cs = std::cos(e.rotation);
  const double sn = std::sin(e.rotation);
  const double ix = 1.0 / (e.semi_axes[0] * e.semi_axes[0]);
  const double iy = 1.0 / (e.semi_axes[1] * e.semi_axes[1]);
  const double cx = e.center[0];
  const double cy = e.center[1];

  // ((x-cx)cos + (y-cy)sin)^2 / rx^2 + (-(x-cx)sin + (y-cy)cos)^2 / ry^2 = 1
  const double a = cs * cs * ix + sn * sn * iy;
  const double b = 2.0 * cs * sn * (ix - iy);
  const double c = sn * sn * ix + cs * cs * iy;
  const double d = -2.0 * a * cx - b * cy;
  const double ee = -b * cx - 2.0 * c * cy;
  const double f = a * cx * cx + b * cx * cy + c * cy * cy - 1.0;

  const double trace = a + c;  // = ix + iy > 0
  return ConicParams{{a / trace, b / trace, c / trace, d / trace, ee / trace, f / trace}};
}

GeometricEllipse conic_to_geometric(const ConicParams& theta) {
  if (!theta.valid() || !is_ellipse(theta)) {
    throw Error(ErrorCode::NotAnEllipse, "discriminant b^2 - 4ac is not negative");
  }
  Vec6 t = theta.theta;
  if (t[0] + t[2] < 0.0) {
    for (double& v : t) v = -v;
  }
  const auto [a, b, c, d, e, f] = t;

  const double det = 4.0 * a * c - b * b;
  const double cx = (b * e - 2.0 * c * d) / det;
  const double cy = (b * d - 2.0 * a * e) / det;
  const double f0 = f + 0.5 * (d * cx + e * cy);

  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), 0.5 * b);
  const double lam_small = mean - radius;
  const double lam_large = mean + radius;
  if (!(lam_small > 0.0) || !(f0 < 0.0)) {
    throw Error(ErrorCode::NotAnEllipse, "conic has no real points (imaginary or point ellipse)");
  }

  GeometricEllipse out;
  out.center = {cx, cy};
  out.semi_axes = {std::sqrt(-f0 / lam_small), std::sqrt(-f0 / lam_large)};

  double rot = 0.0;
  if (radius > 1e-12 * mean) {
    // Largest-curvature direction is 0.5*atan2(b, a-c); the major axis is normal to it.
    rot = 0.5 * std::atan2(b, a - c) + 0.5 * std::numbers::pi;
    rot = std::fmod(rot, std::numbers::pi);
    if (rot < 0.0) rot += std::numbers::pi;
    if (rot >= std::numbers::pi) rot -= std::numbers::pi;
  } else {
    out.semi_axes[1] = out.semi_axes[0];
  }
  out.rotation = rot;
  return out;
}

TransformedConic transform_conic(const ConicParams& theta, const AffineMap2D& map) {
  if (!map.invertible()) throw Error(ErrorCode::InvalidInput, "affine map is not invertible");
  // Substitute p = inverse(q): x = al*qx + be, y = ga*qy + de.
  const double al = 1.0 / map.scale[0];
  const double be = -map.offset[0] / map.scale[0];
  const double ga = 1.0 / map.scale[1];
  const double de = -map.offset[1] / map.scale[1];
  const auto [a, b, c, d, e, f] = theta.theta;

  ConicParams raw{{
      a * al * al,
      b * al * ga,
      c * ga * ga,
      2.0 * a * al * be + b * al * de + d * al,
      b * be * ga + 2.0 * c * ga * de + e * ga,
      a * be * be + b * be * de + c * de * de + d * be + e * de + f,
  }};
  if (auto n = raw.normalized()) return {*n, true};
  return {raw, false};
}

}  // namespace stackfit
