#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stackfit/conic.hpp"
#include "stackfit/fitting.hpp"
#include "stackfit/rng.hpp"
#include "stackfit/volume.hpp"

namespace stackfit {

/// Inliers on `truth` plus uniform contamination, swept over noise counts.
struct SynthSpec {
  GeometricEllipse truth{{0.0, 0.0}, {1.5, 0.8}, 0.0};
  std::size_t n_inliers = 50;
  double inlier_jitter_sigma = 0.0;
  double noise_lo = -3.0;
  double noise_hi = 3.0;
  std::vector<std::size_t> noise_counts;
  std::uint64_t seed = 42;

  /// Counts 0, 10, ..., 200.
  static std::vector<std::size_t> default_counts();
  void validate() const;
};

struct BenchRecord {
  std::size_t noise_count = 0;
  double err_squared = 0.0;
  double err_robust = 0.0;
  /// Set when a fit failed; the failed error is NaN.
  std::optional<std::string> squared_error_message;
  std::optional<std::string> robust_error_message;
};

/// Uniform parametric angles in [0, 2pi), isotropic Gaussian jitter.
std::vector<Vec2> sample_ellipse_points(const GeometricEllipse& e, std::size_t n,
                                        double jitter_sigma, Xorshift64Star& rng);

/// i.i.d. uniform per coordinate on [lo, hi).
std::vector<Vec2> sample_uniform_noise(std::size_t count, double lo, double hi,
                                       Xorshift64Star& rng);

/// ||theta_a - theta_b||_2 with both conics rescaled to a + c = 1 (infinite
/// when either cannot be).
double conic_error(const ConicParams& fit, const ConicParams& truth);

/// Inliers come from a stream seeded by spec.seed and are shared by all rows;
/// each row's contamination comes from derive_seed(spec.seed, noise_count).
std::vector<BenchRecord> run_robustness_bench(const SynthSpec& spec, const FitConfig& cfg);

/// Smallest count c* in the sweep such that err_robust < err_squared for
/// every row with count >= c*; empty when the last row does not satisfy it.
std::optional<std::size_t> crossover_count(std::span<const BenchRecord> records);

struct GaussianBlob {
  Vec3 center{};
  Vec3 sigma{1.0, 1.0, 1.0};
  double amplitude = 1.0;
};

/// Sum of anisotropic Gaussians (voxel units) plus uniform noise in
/// [-noise_amplitude, noise_amplitude], clamped at zero.
Volume synth_volume(std::span<const GaussianBlob> blobs, Dims3 dims, double noise_amplitude,
                    std::uint64_t seed, Vec3 spacing = {1.0, 1.0, 1.0});

/// Solid axis-aligned ellipsoid of the given amplitude. In-plane partial
/// occupancy is estimated on a supersample x supersample grid per voxel;
/// each slice is the cross-section at its integer z.
Volume render_ellipsoid(Dims3 dims, const Vec3& center, const Vec3& semi_axes, double amplitude,
                        int supersample = 4, Vec3 spacing = {1.0, 1.0, 1.0});

/// Semi-axes of the cross-section at height h from the center, or empty
/// beyond the poles.
std::optional<Vec2> ellipsoid_cross_section(const Vec3& semi_axes, double h);

/// Points on the cross-sections of an axis-aligned ellipsoid at every integer
/// z in [z_first, z_last] that cuts it. Layer point counts scale with the
/// cross-section size relative to the equator (minimum 3).
std::vector<LayerPointSet> synth_stack(const Vec3& center, const Vec3& semi_axes, int z_first,
                                       int z_last, std::size_t points_per_layer, double jitter,
                                       std::uint64_t seed);

}  // namespace stackfit
