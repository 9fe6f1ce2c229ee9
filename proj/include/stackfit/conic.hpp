#pragma once

#include <array>
#include <optional>

namespace stackfit {

using Vec2 = std::array<double, 2>;
using Vec6 = std::array<double, 6>;

/// General conic a x^2 + b xy + c y^2 + d x + e y + f = 0, stored as
/// theta = [a, b, c, d, e, f].
struct ConicParams {
  Vec6 theta{};

  double a() const { return theta[0]; }
  double b() const { return theta[1]; }
  double c() const { return theta[2]; }
  double d() const { return theta[3]; }
  double e() const { return theta[4]; }
  double f() const { return theta[5]; }

  /// Finite and not identically zero.
  bool valid() const;

  /// a + c == 1 within tol.
  bool is_normalized(double tol = 1e-9) const;

  /// Rescaled so that a + c = 1; empty when |a + c| is too small to divide by.
  std::optional<ConicParams> normalized() const;

  double discriminant() const { return theta[1] * theta[1] - 4.0 * theta[0] * theta[2]; }
};

/// Ellipse by center, semi-axes and counter-clockwise rotation of the first
/// axis from +x. Canonical form (as produced by conic_to_geometric) has
/// semi_axes[0] >= semi_axes[1] and rotation in [0, pi).
struct GeometricEllipse {
  Vec2 center{};
  Vec2 semi_axes{1.0, 1.0};
  double rotation = 0.0;

  bool valid() const;
};

/// p -> scale * p + offset, per axis.
struct AffineMap2D {
  Vec2 scale{1.0, 1.0};
  Vec2 offset{0.0, 0.0};

  Vec2 apply(const Vec2& p) const;
  AffineMap2D inverse() const;
  bool invertible() const;
};

/// [x^2, xy, y^2, x, y, 1]
Vec6 lift_point(const Vec2& p);

/// lift_point(p) . theta
double algebraic_distance(const ConicParams& theta, const Vec2& p);

/// b^2 - 4ac < 0
bool is_ellipse(const ConicParams& theta);

/// Conic through the ellipse boundary, in the a + c = 1 gauge.
ConicParams geometric_to_conic(const GeometricEllipse& e);

/// Inverse of geometric_to_conic. Throws Error(NotAnEllipse) for a
/// non-negative discriminant or when the ellipse has no real points.
GeometricEllipse conic_to_geometric(const ConicParams& theta);

struct TransformedConic {
  ConicParams conic;
  /// False when a + c vanished after substitution; conic is then returned
  /// in whatever scale the substitution produced.
  bool normalized = true;
};

/// Re-expresses theta in the frame q = map(p): the result vanishes at map(p)
/// exactly where theta vanishes at p.
TransformedConic transform_conic(const ConicParams& theta, const AffineMap2D& map);

}  // namespace stackfit
