#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stackfit/conic.hpp"
#include "stackfit/lp.hpp"

namespace stackfit {

/// Points of one z-layer, in original (pixel) coordinates.
struct LayerPointSet {
  int layer_index = 0;
  std::vector<Vec2> points;
};

enum class Loss { Squared, Robust };

struct FitConfig {
  /// Dead-zone half-width of the epsilon-insensitive loss, in normalized units.
  double epsilon = 0.1;
  /// Weight of the L1 coupling between consecutive layers.
  double lambda = 1.0;
  bool normalize_coords = true;
  Loss loss = Loss::Robust;
  /// Weight on the sum of absolute residuals added to the robust objective.
  /// Picks the smallest-residual conic among equal-loss optima (noise-free
  /// points inside the dead zone otherwise admit a whole polytope of them).
  /// Not included in reported objective values. 0 disables it.
  double residual_weight = 1e-6;
  lp::SolverConfig solver{};

  void validate() const;
};

/// max(|r| - epsilon, 0)
double epsilon_insensitive_loss(double r, double epsilon);

/// Isotropic map sending the bounding box of all points into [-1, 1]^2: the
/// box center goes to the origin and its longer side spans [-1, 1]. A single
/// point (or all-identical points) maps with unit scale.
AffineMap2D normalization_map(std::span<const LayerPointSet> layers);

/// Extra linear equality on every layer's theta (in the fitting frame).
struct ThetaEquality {
  Vec6 coeffs{};
  double rhs = 0.0;
};

/// Column layout of the robust stack LP. Per layer t (in ascending
/// layer_index order): theta block at theta_col(t); per point i of that
/// layer: s at s_col + offset, t at t_col + offset; per adjacent pair p:
/// six u columns at u_col + 6p.
struct RobustLpLayout {
  std::size_t num_layers = 0;
  std::size_t num_points = 0;
  std::size_t s_col = 0;
  std::size_t t_col = 0;
  std::size_t u_col = 0;
  std::vector<std::size_t> point_offset;  // first point index per layer
  std::size_t theta_col(std::size_t layer) const { return 6 * layer; }
};

struct RobustLp {
  lp::LinearProgram lp;
  RobustLpLayout layout;
  AffineMap2D normalization;           // original -> fitting frame
  std::vector<LayerPointSet> layers;   // sorted, already mapped into the fitting frame
};

/// Builds
///   min  sum t_{l,i} + lambda * sum u_{l,j}
///   s.t. +x_{l,i}.theta_l - s_{l,i} <= 0,  -x_{l,i}.theta_l - s_{l,i} <= 0,
///        s_{l,i} - t_{l,i} <= epsilon,
///        +/-(theta_{l,j} - theta_{l+1,j}) - u_{l,j} <= 0,
///        theta_{l,a} + theta_{l,c} = 1,
/// with theta free and s, t, u >= 0. Rows are emitted in that order: per
/// point the two sign rows and the epsilon row, then coupling rows per pair,
/// then gauge rows, then any extra equalities. Throws Error(EmptyLayer) for a
/// layer without points and Error(InvalidInput) for duplicate layer indices.
RobustLp build_robust_lp(std::span<const LayerPointSet> layers, const FitConfig& cfg,
                         std::span<const ThetaEquality> extra = {});

struct LayerFit {
  int layer_index = 0;
  ConicParams conic;             // original coordinates, a + c = 1 when possible
  ConicParams fitting_conic;     // fitting frame, a + c = 1
  std::optional<GeometricEllipse> ellipse;
  bool is_ellipse = false;
  double loss = 0.0;             // sum of epsilon-insensitive residuals, fitting frame
};

struct StackFitResult {
  std::vector<LayerFit> layers;
  double objective_value = 0.0;  // fitting frame
  lp::Status status = lp::Status::Optimal;
  std::size_t iterations = 0;
  AffineMap2D normalization;

  /// max over consecutive layers of ||theta_l - theta_{l+1}||_1 in the fitting frame.
  double max_coupling_l1() const;
  /// sum over consecutive layers of ||theta_l - theta_{l+1}||_1 in the fitting frame.
  double total_coupling_l1() const;
};

/// Joint graph-regularized robust fit. Throws Error(InternalError) if the
/// solver reports anything but Optimal.
StackFitResult fit_stack_robust(std::span<const LayerPointSet> layers, const FitConfig& cfg,
                                std::span<const ThetaEquality> extra = {});

struct ConicFit {
  ConicParams conic;  // original coordinates
  bool is_ellipse = false;
  double objective = 0.0;
};

/// Squared algebraic loss under a + c = 1. Throws Error(DegeneratePoints)
/// for singular configurations and Error(InvalidInput) for < 5 points.
ConicFit fit_ellipse_squared(std::span<const Vec2> points, const FitConfig& cfg = {});

/// Single-layer epsilon-insensitive fit.
ConicFit fit_ellipse_robust(std::span<const Vec2> points, const FitConfig& cfg = {});

struct CircleFit {
  Vec2 center{};
  double radius = 0.0;
  double objective = 0.0;
};

/// Robust LP with b = 0 and a = c added. Throws Error(ImaginaryCircle) when
/// the fitted conic has no real radius, Error(InvalidInput) for < 3 points.
CircleFit fit_circle_robust(std::span<const Vec2> points, const FitConfig& cfg = {});

/// Dispatches on cfg.loss. Squared fits each layer independently.
StackFitResult fit_stack(std::span<const LayerPointSet> layers, const FitConfig& cfg);

}  // namespace stackfit
