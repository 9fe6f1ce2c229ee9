#include "stackfit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stackfit/error.hpp"

namespace stackfit {

std::vector<std::size_t> SynthSpec::default_counts() {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c <= 200; c += 10) out.push_back(c);
  return out;
}

void SynthSpec::validate() const {
  if (!truth.valid()) throw Error(ErrorCode::InvalidInput, "truth ellipse is invalid");
  if (n_inliers == 0) throw Error(ErrorCode::InvalidInput, "n_inliers must be positive");
  if (!(noise_lo < noise_hi)) throw Error(ErrorCode::InvalidInput, "noise interval needs lo < hi");
  if (!(inlier_jitter_sigma >= 0.0)) throw Error(ErrorCode::InvalidInput, "jitter must be >= 0");
  if (!std::is_sorted(noise_counts.begin(), noise_counts.end())) {
    throw Error(ErrorCode::InvalidInput, "noise counts must be non-decreasing");
  }
}

std::vector<Vec2> sample_ellipse_points(const GeometricEllipse& e, std::size_t n,
                                        double jitter_sigma, Xorshift64Star& rng) {
  const double cr = std::cos(e.rotation);
  const double sr = std::sin(e.rotation);
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double u = e.semi_axes[0] * std::cos(t);
    const double v = e.semi_axes[1] * std::sin(t);
    Vec2 p{e.center[0] + cr * u - sr * v, e.center[1] + sr * u + cr * v};
    if (jitter_sigma > 0.0) {
      p[0] += jitter_sigma * rng.normal();
      p[1] += jitter_sigma * rng.normal();
    }
    pts.push_back(p);
  }
  return pts;
}

std::vector<Vec2> sample_uniform_noise(std::size_t count, double lo, double hi,
                                       Xorshift64Star& rng) {
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(lo, hi);
    const double y = rng.uniform(lo, hi);
    pts.push_back({x, y});
  }
  return pts;
}

double conic_error(const ConicParams& fit, const ConicParams& truth) {
  const auto a = fit.normalized();
  const auto b = truth.normalized();
  if (!a || !b) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double d = a->theta[j] - b->theta[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<BenchRecord> run_robustness_bench(const SynthSpec& spec, const FitConfig& cfg) {
  spec.validate();
  cfg.validate();
  const ConicParams truth = geometric_to_conic(spec.truth);
  Xorshift64Star inlier_rng(spec.seed);
  const std::vector<Vec2> inliers =
      sample_ellipse_points(spec.truth, spec.n_inliers, spec.inlier_jitter_sigma, inlier_rng);

  std::vector<BenchRecord> out;
  out.reserve(spec.noise_counts.size());
  for (std::size_t count : spec.noise_counts) {
    Xorshift64Star rng(derive_seed(spec.seed, count));
    std::vector<Vec2> pts = inliers;
    const auto noise = sample_uniform_noise(count, spec.noise_lo, spec.noise_hi, rng);
    pts.insert(pts.end(), noise.begin(), noise.end());

    BenchRecord rec;
    rec.noise_count = count;
    try {
      rec.err_squared = conic_error(fit_ellipse_squared(pts, cfg).conic, truth);
    } catch (const Error& e) {
      rec.err_squared = std::numeric_limits<double>::quiet_NaN();
      rec.squared_error_message = e.what();
    }
    try {
      rec.err_robust = conic_error(fit_ellipse_robust(pts, cfg).conic, truth);
    } catch (const Error& e) {
      rec.err_robust = std::numeric_limits<double>::quiet_NaN();
      rec.robust_error_message = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::optional<std::size_t> crossover_count(std::span<const BenchRecord> records) {
  std::optional<std::size_t> result;
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (!(it->err_robust < it->err_squared)) break;
    result = it->noise_count;
  }
  return result;
}

Volume synth_volume(std::span<const GaussianBlob> blobs, Dims3 dims, double noise_amplitude,
                    std::uint64_t seed, Vec3 spacing) {
  Volume v(dims, spacing);
  for (const auto& b : blobs) {
    // Truncate each blob at 6 sigma; beyond that it is below double resolution of the peak.
    std::array<std::size_t, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      const double r = 6.0 * b.sigma[a];
      lo[a] = static_cast<std::size_t>(std::max(0.0, std::floor(b.center[a] - r)));
      hi[a] = static_cast<std::size_t>(
          std::clamp(std::ceil(b.center[a] + r), 0.0, static_cast<double>(dims[a]) - 1.0));
    }
    for (std::size_t z = lo[2]; z <= hi[2]; ++z) {
      const double gz = (static_cast<double>(z) - b.center[2]) / b.sigma[2];
      for (std::size_t y = lo[1]; y <= hi[1]; ++y) {
        const double gy = (static_cast<double>(y) - b.center[1]) / b.sigma[1];
        for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
          const double gx = (static_cast<double>(x) - b.center[0]) / b.sigma[0];
          v.at(x, y, z) += b.amplitude * std::exp(-0.5 * (gx * gx + gy * gy + gz * gz));
        }
      }
    }
  }
  if (noise_amplitude > 0.0) {
    Xorshift64Star rng(seed);
    for (double& x : v.data) x = std::max(0.0, x + rng.uniform(-noise_amplitude, noise_amplitude));
  }
  return v;
}

std::optional<Vec2> ellipsoid_cross_section(const Vec3& semi_axes, double h) {
  const double q = 1.0 - (h * h) / (semi_axes[2] * semi_axes[2]);
  if (!(q > 0.0)) return std::nullopt;
  const double k = std::sqrt(q);
  return Vec2{semi_axes[0] * k, semi_axes[1] * k};
}

Volume render_ellipsoid(Dims3 dims, const Vec3& center, const Vec3& semi_axes, double amplitude,
                        int supersample, Vec3 spacing) {
  if (supersample < 1) throw Error(ErrorCode::InvalidInput, "supersample must be >= 1");
  Volume v(dims, spacing);
  const double step = 1.0 / supersample;
  const double weight = amplitude / (supersample * supersample);
  for (std::size_t z = 0; z < dims[2]; ++z) {
    const auto sec = ellipsoid_cross_section(semi_axes, static_cast<double>(z) - center[2]);
    if (!sec) continue;
    const double rx = (*sec)[0];
    const double ry = (*sec)[1];
    for (std::size_t y = 0; y < dims[1]; ++y) {
      for (std::size_t x = 0; x < dims[0]; ++x) {
        int inside = 0;
        for (int sy = 0; sy < supersample; ++sy) {
          const double py = static_cast<double>(y) - 0.5 + (sy + 0.5) * step - center[1];
          for (int sx = 0; sx < supersample; ++sx) {
            const double px = static_cast<double>(x) - 0.5 + (sx + 0.5) * step - center[0];
            if ((px * px) / (rx * rx) + (py * py) / (ry * ry) <= 1.0) ++inside;
          }
        }
        v.at(x, y, z) = weight * inside;
      }
    }
  }
  return v;
}

std::vector<LayerPointSet> synth_stack(const Vec3& center, const Vec3& semi_axes, int z_first,
                                       int z_last, std::size_t points_per_layer, double jitter,
                                       std::uint64_t seed) {
  std::vector<LayerPointSet> out;
  for (int z = z_first; z <= z_last; ++z) {
    const double h = static_cast<double>(z) - center[2];
    const auto sec = ellipsoid_cross_section(semi_axes, h);
    if (!sec) continue;
    const double ratio = (*sec)[0] / semi_axes[0];
    const auto n = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::lround(ratio * static_cast<double>(points_per_layer))));
    Xorshift64Star rng(derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(z))));
    const GeometricEllipse e{{center[0], center[1]}, *sec, 0.0};
    out.push_back({z, sample_ellipse_points(e, n, jitter, rng)});
  }
  return out;
}

}  // namespace stackfit
