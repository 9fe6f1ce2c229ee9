#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stackfit/conic.hpp"
#include "stackfit/error.hpp"
#include "stackfit/rng.hpp"

using namespace stackfit;
using doctest::Approx;

namespace {

const ConicParams kUnitCircle{{0.5, 0.0, 0.5, 0.0, 0.0, -0.5}};

void check_theta(const ConicParams& got, const Vec6& want, double tol) {
  for (int i = 0; i < 6; ++i) CHECK(std::abs(got.theta[i] - want[i]) < tol);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("lift_point") {
  CHECK(lift_point({0, 0}) == Vec6{0, 0, 0, 0, 0, 1});
  CHECK(lift_point({1, 0}) == Vec6{1, 0, 0, 1, 0, 1});
  CHECK(lift_point({2, 3}) == Vec6{4, 6, 9, 2, 3, 1});
}

TEST_CASE("algebraic_distance") {
  CHECK(algebraic_distance(kUnitCircle, {1, 0}) == 0.0);
  CHECK(algebraic_distance(kUnitCircle, {2, 0}) == 1.5);
  CHECK(algebraic_distance(kUnitCircle, {0, 0}) == -0.5);
}

TEST_CASE("is_ellipse") {
  CHECK(is_ellipse(kUnitCircle));
  CHECK_FALSE(is_ellipse(ConicParams{{1, 0, -1, 0, 0, -1}}));
  CHECK_FALSE(is_ellipse(ConicParams{{0, 0, 0, 1, 1, 0}}));
}

TEST_CASE("is_ellipse is scale invariant") {
  Xorshift64Star rng(3);
  for (int k = 0; k < 200; ++k) {
    ConicParams t;
    for (auto& v : t.theta) v = rng.uniform(-1, 1);
    const double s = rng.uniform(-5, 5);
    if (s == 0.0) continue;
    ConicParams u = t;
    for (auto& v : u.theta) v *= s;
    CHECK(is_ellipse(t) == is_ellipse(u));
  }
}

TEST_CASE("geometric_to_conic examples") {
  check_theta(geometric_to_conic({{0, 0}, {1, 1}, 0}), kUnitCircle.theta, 1e-12);
  const auto t = geometric_to_conic({{1, 2}, {2, 1}, 0});
  check_theta(t, {0.2, 0, 0.8, -0.4, -3.2, 2.6}, 1e-12);
  for (Vec2 p : {Vec2{3, 2}, Vec2{-1, 2}, Vec2{1, 3}, Vec2{1, 1}}) CHECK(std::abs(algebraic_distance(t, p)) < 1e-12);
  const auto r = geometric_to_conic({{0, 0}, {2, 1}, std::numbers::pi / 2});
  check_theta(r, geometric_to_conic({{0, 0}, {1, 2}, 0}).theta, 1e-12);
  CHECK(t.is_normalized());
}

TEST_CASE("conic_to_geometric examples") {
  auto g = conic_to_geometric(kUnitCircle);
  CHECK(g.center[0] == Approx(0.0));
  CHECK(g.center[1] == Approx(0.0));
  CHECK(g.semi_axes[0] == Approx(1.0));
  CHECK(g.semi_axes[1] == Approx(1.0));
  CHECK(g.rotation == Approx(0.0));

  g = conic_to_geometric(ConicParams{{0.2, 0, 0.8, -0.4, -3.2, 2.6}});
  CHECK(g.center[0] == Approx(1.0));
  CHECK(g.center[1] == Approx(2.0));
  CHECK(g.semi_axes[0] == Approx(2.0));
  CHECK(g.semi_axes[1] == Approx(1.0));
  CHECK(g.rotation == Approx(0.0));

  try {
    conic_to_geometric(ConicParams{{1, 0, -1, 0, 0, -1}});
    FAIL("expected NotAnEllipse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAnEllipse);
  }
  // x^2 + y^2 + 1 = 0 has no real points.
  CHECK_THROWS_AS(conic_to_geometric(ConicParams{{0.5, 0, 0.5, 0, 0, 0.5}}), Error);
}

TEST_CASE("boundary points have zero algebraic distance and round trip holds") {
  Xorshift64Star rng(11);
  for (int k = 0; k < 500; ++k) {
    GeometricEllipse e;
    e.center = {rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const double r1 = rng.uniform(0.5, 20), r2 = rng.uniform(0.5, 20);
    e.semi_axes = {std::max(r1, r2), std::min(r1, r2)};
    if (e.semi_axes[0] < 1.01 * e.semi_axes[1]) e.semi_axes[0] = 1.05 * e.semi_axes[1];
    e.rotation = rng.uniform(0, std::numbers::pi);
    const auto t = geometric_to_conic(e);
    CHECK(t.is_normalized());
    for (int j = 0; j < 16; ++j) {
      const double phi = 2 * std::numbers::pi * j / 16;
      const double u = e.semi_axes[0] * std::cos(phi), v = e.semi_axes[1] * std::sin(phi);
      const Vec2 p{e.center[0] + u * std::cos(e.rotation) - v * std::sin(e.rotation),
                   e.center[1] + u * std::sin(e.rotation) + v * std::cos(e.rotation)};
      // scale the residual bound with the magnitude of the lifted terms
      const double mag = 1.0 + p[0] * p[0] + p[1] * p[1];
      CHECK(std::abs(algebraic_distance(t, p)) < 1e-9 * mag);
    }
    const auto g = conic_to_geometric(t);
    CHECK(rel(g.center[0], e.center[0]) < 1e-6);
    CHECK(rel(g.center[1], e.center[1]) < 1e-6);
    CHECK(rel(g.semi_axes[0], e.semi_axes[0]) < 1e-6);
    CHECK(rel(g.semi_axes[1], e.semi_axes[1]) < 1e-6);
    CHECK(std::abs(g.rotation - e.rotation) < 1e-6);
  }
}

TEST_CASE("canonical form of a circle-like or swapped ellipse") {
  const auto g = conic_to_geometric(geometric_to_conic({{3, -1}, {1, 4}, 0.3}));
  CHECK(g.semi_axes[0] == Approx(4.0));
  CHECK(g.semi_axes[1] == Approx(1.0));
  CHECK(g.rotation == Approx(0.3 + std::numbers::pi / 2));
  CHECK(g.rotation >= 0.0);
  CHECK(g.rotation < std::numbers::pi);
}

TEST_CASE("algebraic_distance is linear in theta") {
  Xorshift64Star rng(5);
  for (int k = 0; k < 200; ++k) {
    ConicParams t1, t2, mix;
    for (auto& v : t1.theta) v = rng.uniform(-2, 2);
    for (auto& v : t2.theta) v = rng.uniform(-2, 2);
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    for (int i = 0; i < 6; ++i) mix.theta[i] = a * t1.theta[i] + b * t2.theta[i];
    const Vec2 p{rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const double lhs = algebraic_distance(mix, p);
    const double rhs = a * algebraic_distance(t1, p) + b * algebraic_distance(t2, p);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}) * 100);
  }
}

TEST_CASE("transform_conic") {
  SUBCASE("identity") {
    const auto t = transform_conic(kUnitCircle, {});
    CHECK(t.normalized);
    check_theta(t.conic, kUnitCircle.theta, 1e-15);
  }
  SUBCASE("scaling by 2") {
    const auto t = transform_conic(kUnitCircle, {{2, 2}, {0, 0}});
    check_theta(t.conic, geometric_to_conic({{0, 0}, {2, 2}, 0}).theta, 1e-12);
  }
  SUBCASE("translation") {
    const auto t = transform_conic(kUnitCircle, {{1, 1}, {1, 2}});
    check_theta(t.conic, geometric_to_conic({{1, 2}, {1, 1}, 0}).theta, 1e-12);
  }
  SUBCASE("zero set maps exactly, single scalar factor") {
    Xorshift64Star rng(9);
    const ConicParams theta{{0.3, 0.2, 0.7, -0.1, 0.4, -0.9}};
    const AffineMap2D m{{2.5, 0.7}, {-3, 4}};
    const auto t = transform_conic(theta, m);
    double k = std::nan("");
    for (int i = 0; i < 50; ++i) {
      const Vec2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const double d0 = algebraic_distance(theta, p);
      const double d1 = algebraic_distance(t.conic, m.apply(p));
      if (std::abs(d0) < 1e-3) continue;
      if (std::isnan(k)) k = d1 / d0;
      CHECK(d1 == Approx(k * d0).epsilon(1e-10));
    }
    CHECK(k != 0.0);
  }
  SUBCASE("gauge failure is flagged") {
    // a = 1, c = -1 stays a + c = 0 under a uniform scale
    const auto t = transform_conic(ConicParams{{1, 0, -1, 0, 0, -1}}, {{2, 2}, {0, 0}});
    CHECK_FALSE(t.normalized);
  }
}

TEST_CASE("normalized and validity helpers") {
  CHECK_FALSE(ConicParams{}.valid());
  CHECK(kUnitCircle.valid());
  const auto n = ConicParams{{2, 0, 2, 0, 0, -2}}.normalized();
  REQUIRE(n);
  CHECK(n->theta[0] == Approx(0.5));
  CHECK_FALSE(ConicParams{{1, 0, -1, 0, 0, 1}}.normalized());
  CHECK(AffineMap2D{{2, 4}, {1, 1}}.inverse().apply(AffineMap2D{{2, 4}, {1, 1}}.apply({3, 5}))[1] == Approx(5.0));
}
