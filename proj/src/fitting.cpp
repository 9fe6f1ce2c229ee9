#include "stackfit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "stackfit/error.hpp"
#include "stackfit/lsq.hpp"

namespace stackfit {

void FitConfig::validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::InvalidInput, "epsilon must be finite and >= 0");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error(ErrorCode::InvalidInput, "lambda must be finite and >= 0");
  }
  if (!std::isfinite(residual_weight) || residual_weight < 0.0) {
    throw Error(ErrorCode::InvalidInput, "residual_weight must be finite and >= 0");
  }
}

double epsilon_insensitive_loss(double r, double epsilon) {
  return std::max(std::abs(r) - epsilon, 0.0);
}

AffineMap2D normalization_map(std::span<const LayerPointSet> layers) {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& layer : layers) {
    for (const auto& p : layer.points) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
  }
  if (!(xmin <= xmax)) return {};
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double half = 0.5 * std::max(xmax - xmin, ymax - ymin);
  const double s = half > 0.0 ? 1.0 / half : 1.0;
  return {{s, s}, {-cx * s, -cy * s}};
}

namespace {

void check_points(std::span<const Vec2> pts) {
  for (const auto& p : pts) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw Error(ErrorCode::InvalidInput, "non-finite point coordinate");
    }
  }
}

std::vector<LayerPointSet> sorted_layers(std::span<const LayerPointSet> layers) {
  if (layers.empty()) throw Error(ErrorCode::EmptyLayer, "no layers given");
  std::vector<LayerPointSet> out(layers.begin(), layers.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.layer_index < b.layer_index; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].points.empty()) {
      throw Error(ErrorCode::EmptyLayer,
                  "layer " + std::to_string(out[i].layer_index) + " has no points");
    }
    if (i > 0 && out[i].layer_index == out[i - 1].layer_index) {
      throw Error(ErrorCode::InvalidInput,
                  "duplicate layer index " + std::to_string(out[i].layer_index));
    }
    check_points(out[i].points);
  }
  return out;
}

double l1_diff(const Vec6& a, const Vec6& b) {
  double acc = 0.0;
  for (int j = 0; j < 6; ++j) acc += std::abs(a[j] - b[j]);
  return acc;
}

ConicParams to_original(const ConicParams& fitted, const AffineMap2D& normalization) {
  return transform_conic(fitted, normalization.inverse()).conic;
}

}  // namespace

RobustLp build_robust_lp(std::span<const LayerPointSet> layers_in, const FitConfig& cfg,
                         std::span<const ThetaEquality> extra) {
  cfg.validate();
  RobustLp out;
  out.layers = sorted_layers(layers_in);
  out.normalization = cfg.normalize_coords ? normalization_map(out.layers) : AffineMap2D{};
  for (auto& layer : out.layers) {
    for (auto& p : layer.points) p = out.normalization.apply(p);
  }

  auto& L = out.layout;
  L.num_layers = out.layers.size();
  L.point_offset.resize(L.num_layers);
  for (std::size_t l = 0; l < L.num_layers; ++l) {
    L.point_offset[l] = L.num_points;
    L.num_points += out.layers[l].points.size();
  }
  const std::size_t pairs = L.num_layers - 1;
  L.s_col = 6 * L.num_layers;
  L.t_col = L.s_col + L.num_points;
  L.u_col = L.t_col + L.num_points;
  const std::size_t nvars = L.u_col + 6 * pairs;

  lp::LinearProgram& prog = out.lp;
  prog = lp::LinearProgram(nvars);
  for (std::size_t j = 0; j < 6 * L.num_layers; ++j) prog.bounds[j] = {-lp::kInf, lp::kInf};
  for (std::size_t i = 0; i < L.num_points; ++i) {
    prog.objective[L.t_col + i] = 1.0;
    prog.objective[L.s_col + i] = cfg.residual_weight;
  }
  for (std::size_t k = 0; k < 6 * pairs; ++k) prog.objective[L.u_col + k] = cfg.lambda;

  prog.constraints.reserve(3 * L.num_points + 12 * pairs + L.num_layers * (1 + extra.size()));
  for (std::size_t l = 0; l < L.num_layers; ++l) {
    const std::size_t th = L.theta_col(l);
    const auto& pts = out.layers[l].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec6 z = lift_point(pts[i]);
      const std::size_t s = L.s_col + L.point_offset[l] + i;
      const std::size_t t = L.t_col + L.point_offset[l] + i;
      for (double sign : {1.0, -1.0}) {
        auto& row = prog.add_row(lp::Relation::LE, 0.0);
        for (int j = 0; j < 6; ++j) row.coeffs[th + j] = sign * z[j];
        row.coeffs[s] = -1.0;
      }
      auto& eps_row = prog.add_row(lp::Relation::LE, cfg.epsilon);
      eps_row.coeffs[s] = 1.0;
      eps_row.coeffs[t] = -1.0;
    }
  }
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t j = 0; j < 6; ++j) {
      const std::size_t u = L.u_col + 6 * p + j;
      for (double sign : {1.0, -1.0}) {
        auto& row = prog.add_row(lp::Relation::LE, 0.0);
        row.coeffs[L.theta_col(p) + j] = sign;
        row.coeffs[L.theta_col(p + 1) + j] = -sign;
        row.coeffs[u] = -1.0;
      }
    }
  }
  for (std::size_t l = 0; l < L.num_layers; ++l) {
    auto& row = prog.add_row(lp::Relation::EQ, 1.0);
    row.coeffs[L.theta_col(l) + 0] = 1.0;
    row.coeffs[L.theta_col(l) + 2] = 1.0;
  }
  for (const auto& eq : extra) {
    for (std::size_t l = 0; l < L.num_layers; ++l) {
      auto& row = prog.add_row(lp::Relation::EQ, eq.rhs);
      for (int j = 0; j < 6; ++j) row.coeffs[L.theta_col(l) + j] = eq.coeffs[j];
    }
  }
  return out;
}

double StackFitResult::max_coupling_l1() const {
  double best = 0.0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    best = std::max(best, l1_diff(layers[l].fitting_conic.theta, layers[l + 1].fitting_conic.theta));
  }
  return best;
}

double StackFitResult::total_coupling_l1() const {
  double acc = 0.0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    acc += l1_diff(layers[l].fitting_conic.theta, layers[l + 1].fitting_conic.theta);
  }
  return acc;
}

namespace {

LayerFit make_layer_fit(int layer_index, const ConicParams& fitted, const AffineMap2D& norm,
                        std::span<const Vec2> fitting_points, double epsilon) {
  LayerFit lf;
  lf.layer_index = layer_index;
  lf.fitting_conic = fitted.normalized().value_or(fitted);
  lf.conic = to_original(lf.fitting_conic, norm);
  lf.is_ellipse = is_ellipse(lf.conic);
  if (lf.is_ellipse) {
    try {
      lf.ellipse = conic_to_geometric(lf.conic);
    } catch (const Error&) {
      lf.ellipse.reset();
    }
  }
  for (const auto& p : fitting_points) {
    lf.loss += epsilon_insensitive_loss(algebraic_distance(lf.fitting_conic, p), epsilon);
  }
  return lf;
}

}  // namespace

StackFitResult fit_stack_robust(std::span<const LayerPointSet> layers, const FitConfig& cfg,
                                std::span<const ThetaEquality> extra) {
  const RobustLp built = build_robust_lp(layers, cfg, extra);
  const lp::LpSolution sol = lp::solve(built.lp, cfg.solver);
  if (sol.status != lp::Status::Optimal) {
    throw Error(ErrorCode::InternalError,
                "robust fit LP returned " + lp::to_string(sol.status) +
                    " (the LP is feasible and bounded by construction)");
  }

  StackFitResult res;
  const auto& L = built.layout;
  for (std::size_t i = 0; i < L.num_points; ++i) res.objective_value += sol.x[L.t_col + i];
  const std::size_t pairs = L.num_layers - 1;
  for (std::size_t k = 0; k < 6 * pairs; ++k) res.objective_value += cfg.lambda * sol.x[L.u_col + k];
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.normalization = built.normalization;
  for (std::size_t l = 0; l < built.layout.num_layers; ++l) {
    ConicParams theta;
    for (int j = 0; j < 6; ++j) theta.theta[j] = sol.x[built.layout.theta_col(l) + j];
    res.layers.push_back(make_layer_fit(built.layers[l].layer_index, theta, built.normalization,
                                        built.layers[l].points, cfg.epsilon));
  }
  return res;
}

ConicFit fit_ellipse_robust(std::span<const Vec2> points, const FitConfig& cfg) {
  const LayerPointSet layer{0, {points.begin(), points.end()}};
  const StackFitResult r = fit_stack_robust(std::span(&layer, 1), cfg);
  return {r.layers[0].conic, r.layers[0].is_ellipse, r.objective_value};
}

ConicFit fit_ellipse_squared(std::span<const Vec2> points, const FitConfig& cfg) {
  cfg.validate();
  if (points.size() < 5) {
    throw Error(ErrorCode::InvalidInput, "squared-loss conic fit needs at least 5 points");
  }
  check_points(points);
  const LayerPointSet layer{0, {points.begin(), points.end()}};
  const AffineMap2D norm =
      cfg.normalize_coords ? normalization_map(std::span(&layer, 1)) : AffineMap2D{};
  std::vector<Vec6> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back(lift_point(norm.apply(p)));

  Vec6 theta;
  try {
    theta = solve_linear_eq_constrained_lsq(rows);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularSystem) {
      throw Error(ErrorCode::DegeneratePoints, "points do not determine a unique conic");
    }
    throw;
  }
  ConicFit out;
  const ConicParams fitted{theta};
  out.conic = to_original(fitted, norm);
  out.is_ellipse = is_ellipse(out.conic);
  for (const auto& r : rows) {
    double v = 0.0;
    for (int j = 0; j < 6; ++j) v += r[j] * theta[j];
    out.objective += v * v;
  }
  return out;
}

CircleFit fit_circle_robust(std::span<const Vec2> points, const FitConfig& cfg) {
  if (points.size() < 3) throw Error(ErrorCode::InvalidInput, "circle fit needs at least 3 points");
  const std::array<ThetaEquality, 2> circle_rows{{
      {{0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 0.0},   // b = 0
      {{1.0, 0.0, -1.0, 0.0, 0.0, 0.0}, 0.0},  // a = c
  }};
  const LayerPointSet layer{0, {points.begin(), points.end()}};
  const StackFitResult r = fit_stack_robust(std::span(&layer, 1), cfg, circle_rows);
  const ConicParams& c = r.layers[0].conic;
  const double a = 0.5 * (c.a() + c.c());
  CircleFit out;
  out.center = {-c.d() / (2.0 * a), -c.e() / (2.0 * a)};
  const double r2 = out.center[0] * out.center[0] + out.center[1] * out.center[1] - c.f() / a;
  if (!(r2 > 0.0)) throw Error(ErrorCode::ImaginaryCircle, "fitted circle has no real radius");
  out.radius = std::sqrt(r2);
  out.objective = r.objective_value;
  return out;
}

StackFitResult fit_stack(std::span<const LayerPointSet> layers, const FitConfig& cfg) {
  if (cfg.loss == Loss::Robust) return fit_stack_robust(layers, cfg);

  const auto sorted = sorted_layers(layers);
  StackFitResult res;
  res.normalization = cfg.normalize_coords ? normalization_map(sorted) : AffineMap2D{};
  for (const auto& layer : sorted) {
    const ConicFit fit = fit_ellipse_squared(layer.points, cfg);
    std::vector<Vec2> mapped;
    for (const auto& p : layer.points) mapped.push_back(res.normalization.apply(p));
    const ConicParams fitting = transform_conic(fit.conic, res.normalization).conic;
    LayerFit lf = make_layer_fit(layer.layer_index, fitting, res.normalization, mapped, cfg.epsilon);
    lf.conic = fit.conic;
    lf.loss = 0.0;
    for (const auto& p : mapped) {
      const double r = algebraic_distance(lf.fitting_conic, p);
      lf.loss += r * r;
    }
    res.layers.push_back(std::move(lf));
    res.objective_value += fit.objective;
  }
  return res;
}

}  // namespace stackfit
