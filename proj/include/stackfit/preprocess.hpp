#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "stackfit/fitting.hpp"
#include "stackfit/volume.hpp"

namespace stackfit {

/// Multi-scale detection parameters. sigmas are per-axis Gaussian widths in
/// voxels. A voxel is foreground at one scale when the largest Hessian
/// eigenvalue is below eig_threshold; it survives the combination when at
/// least vote_min scales agree.
struct ScaleConfig {
  std::vector<Vec3> sigmas;
  /// Must be negative. When unset (NaN) the default is
  /// -0.01 * (max - min intensity) / (smallest sigma in physical units)^2.
  double eig_threshold = std::numeric_limits<double>::quiet_NaN();
  /// 0 selects ceil(n/2).
  std::size_t vote_min = 0;
  std::size_t min_voxels = 1;
  std::size_t bbox_margin = 0;

  std::size_t effective_vote() const;
  void validate() const;
};

/// Inclusive voxel ranges per axis.
struct BoundingBox {
  std::array<std::size_t, 3> lo{};
  std::array<std::size_t, 3> hi{};
};

struct SeedRegion {
  std::uint32_t label = 0;
  BoundingBox bbox;
  Vec3 centroid{};
  std::size_t voxel_count = 0;
};

/// Separable Gaussian, kernel truncated at +-ceil(4 sigma) and normalized to
/// unit sum, half-sample symmetric reflection at the borders (which keeps
/// both constants and total mass invariant).
Volume gaussian_smooth(const Volume& v, const Vec3& sigma);

/// Normalized 1D Gaussian taps of length 2*ceil(4 sigma)+1.
std::vector<double> gaussian_kernel(double sigma);

/// Per-voxel Hessian eigenvalues, ascending. count is 3, or 2 for nz == 1.
struct HessianEigenvalues {
  Dims3 dims{};
  int count = 3;
  std::vector<double> values;  // count entries per voxel

  double largest(std::size_t voxel) const { return values[voxel * count + count - 1]; }
};

/// Central second differences scaled by spacing (one-sided at faces) and
/// the closed-form trigonometric eigen-solution of the symmetric 3x3 matrix.
HessianEigenvalues hessian_eigenvalues(const Volume& v);

/// Ascending eigenvalues of the symmetric matrix [[xx xy xz] [xy yy yz] [xz yz zz]].
std::array<double, 3> symmetric_eigenvalues(double xx, double yy, double zz, double xy,
                                            double xz, double yz);

/// Foreground where the largest eigenvalue is < tau (tau < 0).
Mask threshold_mask(const HessianEigenvalues& eigs, double tau);

/// Foreground where at least vote_min masks agree.
Mask combine_scales(std::span<const Mask> masks, std::size_t vote_min);

struct Labeling {
  LabelVolume labels;
  std::vector<SeedRegion> regions;
};

/// 26-connected two-pass union-find labeling. Components smaller than
/// min_voxels are dropped; survivors are numbered 1..K by descending size,
/// ties by smallest linear voxel index. Boxes are grown by margin and clamped.
Labeling label_components(const Mask& mask, std::size_t min_voxels = 1, std::size_t margin = 0);

/// Per-scale foreground masks followed by vote and labeling.
struct Detection {
  std::vector<Mask> scale_masks;
  Mask combined;
  Labeling labeling;
  double eig_threshold = 0.0;
};

Detection detect_regions(const Volume& v, const ScaleConfig& cfg);

/// Default eigenvalue cutoff for a volume and scale set.
double default_eig_threshold(const Volume& v, std::span<const Vec3> sigmas);

/// Object outline per z-slice of the region's box.
///
/// The threshold T is the `intensity_quantile` quantile of the box
/// intensities; voxels strictly above T are the object. Each slice emits the
/// sub-voxel crossings of the half-level (T + box max) / 2 along every
/// in-plane pair of 4-adjacent voxels that straddles it, which lies on the
/// object boundary rather than filling its interior. Slices without
/// crossings are omitted. Throws Error(EmptyRegion) when no voxel exceeds T.
std::vector<LayerPointSet> extract_layer_points(const Volume& v, const SeedRegion& region,
                                                double intensity_quantile = 0.5);

}  // namespace stackfit
