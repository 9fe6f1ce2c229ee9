#include "stackfit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "stackfit/error.hpp"
#include "stackfit/kernels.hpp"

namespace stackfit {

std::size_t ScaleConfig::effective_vote() const {
  return vote_min > 0 ? vote_min : (sigmas.size() + 1) / 2;
}

void ScaleConfig::validate() const {
  if (sigmas.empty()) throw Error(ErrorCode::InvalidInput, "at least one scale is required");
  for (const auto& s : sigmas) {
    for (double v : s) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidInput, "sigmas must be positive");
      }
    }
  }
  const std::size_t k = effective_vote();
  if (k < 1 || k > sigmas.size()) {
    throw Error(ErrorCode::InvalidInput, "vote count must lie in [1, number of scales]");
  }
  if (!std::isnan(eig_threshold) && !(eig_threshold < 0.0)) {
    throw Error(ErrorCode::InvalidInput, "eigenvalue threshold must be negative");
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    w[static_cast<std::size_t>(k + radius)] = v;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

namespace {

// Half-sample symmetric reflection, periodic with period 2n.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

void smooth_x(const Volume& in, Volume& out, const std::vector<double>& w) {
  const std::size_t nx = in.dims[0];
  const auto radius = static_cast<std::ptrdiff_t>(w.size() / 2);
  std::vector<double> padded(nx + w.size() - 1);
  const std::size_t lines = in.dims[1] * in.dims[2];
  for (std::size_t line = 0; line < lines; ++line) {
    const double* src = in.data.data() + line * nx;
    for (std::size_t i = 0; i < padded.size(); ++i) {
      padded[i] = src[reflect(static_cast<std::ptrdiff_t>(i) - radius, nx)];
    }
    kernels::correlate(padded, w, std::span<double>(out.data.data() + line * nx, nx));
  }
}

// Smooths along an axis whose stride is `stride` elements, treating each
// contiguous block of `block` elements as a vector: out_block(i) =
// sum_k w_k * in_block(reflect(i + k - r)), accumulated in k order.
void smooth_strided(const Volume& in, Volume& out, const std::vector<double>& w, std::size_t n,
                    std::size_t block, std::size_t outer) {
  const auto radius = static_cast<std::ptrdiff_t>(w.size() / 2);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * block;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> dst(out.data.data() + base + i * block, block);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (std::size_t k = 0; k < w.size(); ++k) {
        const std::size_t j =
            reflect(static_cast<std::ptrdiff_t>(i) + static_cast<std::ptrdiff_t>(k) - radius, n);
        kernels::axpy(w[k], std::span<const double>(in.data.data() + base + j * block, block), dst);
      }
    }
  }
}

}  // namespace

Volume gaussian_smooth(const Volume& v, const Vec3& sigma) {
  v.validate();
  for (double s : sigma) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidInput, "sigma must be positive");
  }
  const auto [nx, ny, nz] = v.dims;
  Volume a(v.dims, v.spacing);
  Volume b(v.dims, v.spacing);
  if (v.size() == 0) return a;
  smooth_x(v, a, gaussian_kernel(sigma[0]));
  smooth_strided(a, b, gaussian_kernel(sigma[1]), ny, nx, nz);
  smooth_strided(b, a, gaussian_kernel(sigma[2]), nz, nx * ny, 1);
  return a;
}

std::array<double, 3> symmetric_eigenvalues(double xx, double yy, double zz, double xy,
                                            double xz, double yz) {
  const double off = xy * xy + xz * xz + yz * yz;
  std::array<double, 3> ev;
  if (off == 0.0) {
    ev = {xx, yy, zz};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const double q = (xx + yy + zz) / 3.0;
  const double p2 = (xx - q) * (xx - q) + (yy - q) * (yy - q) + (zz - q) * (zz - q) + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  const double bxx = (xx - q) / p;
  const double byy = (yy - q) / p;
  const double bzz = (zz - q) / p;
  const double bxy = xy / p;
  const double bxz = xz / p;
  const double byz = yz / p;
  const double det = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                     bxz * (bxy * byz - byy * bxz);
  const double r = std::clamp(0.5 * det, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double mid = 3.0 * q - hi - lo;
  ev = {lo, mid, hi};
  std::sort(ev.begin(), ev.end());
  return ev;
}

HessianEigenvalues hessian_eigenvalues(const Volume& v) {
  v.validate();
  const auto [nx, ny, nz] = v.dims;
  const bool planar = nz == 1;
  if (nx < 3 || ny < 3 || (!planar && nz < 3)) {
    throw Error(ErrorCode::InvalidInput, "Hessian needs at least 3 voxels per axis (or nz == 1)");
  }
  HessianEigenvalues out;
  out.dims = v.dims;
  out.count = planar ? 2 : 3;
  out.values.resize(v.size() * static_cast<std::size_t>(out.count));

  const double sx = v.spacing[0];
  const double sy = v.spacing[1];
  const double sz = v.spacing[2];
  const auto clampi = [](std::size_t i, std::size_t n) { return std::clamp<std::size_t>(i, 1, n - 2); };

  std::size_t idx = 0;
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x, ++idx) {
        const std::size_t cx = clampi(x, nx);
        const std::size_t cy = clampi(y, ny);
        const double dxx = (v.at(cx + 1, y, z) - 2.0 * v.at(cx, y, z) + v.at(cx - 1, y, z)) / (sx * sx);
        const double dyy = (v.at(x, cy + 1, z) - 2.0 * v.at(x, cy, z) + v.at(x, cy - 1, z)) / (sy * sy);
        const double dxy = (v.at(cx + 1, cy + 1, z) - v.at(cx + 1, cy - 1, z) -
                            v.at(cx - 1, cy + 1, z) + v.at(cx - 1, cy - 1, z)) /
                           (4.0 * sx * sy);
        if (planar) {
          const double mean = 0.5 * (dxx + dyy);
          const double rad = std::hypot(0.5 * (dxx - dyy), dxy);
          out.values[2 * idx] = mean - rad;
          out.values[2 * idx + 1] = mean + rad;
          continue;
        }
        const std::size_t cz = clampi(z, nz);
        const double dzz = (v.at(x, y, cz + 1) - 2.0 * v.at(x, y, cz) + v.at(x, y, cz - 1)) / (sz * sz);
        const double dxz = (v.at(cx + 1, y, cz + 1) - v.at(cx + 1, y, cz - 1) -
                            v.at(cx - 1, y, cz + 1) + v.at(cx - 1, y, cz - 1)) /
                           (4.0 * sx * sz);
        const double dyz = (v.at(x, cy + 1, cz + 1) - v.at(x, cy + 1, cz - 1) -
                            v.at(x, cy - 1, cz + 1) + v.at(x, cy - 1, cz - 1)) /
                           (4.0 * sy * sz);
        const auto ev = symmetric_eigenvalues(dxx, dyy, dzz, dxy, dxz, dyz);
        std::copy(ev.begin(), ev.end(), out.values.begin() + static_cast<std::ptrdiff_t>(3 * idx));
      }
    }
  }
  return out;
}

Mask threshold_mask(const HessianEigenvalues& eigs, double tau) {
  if (!(tau < 0.0)) throw Error(ErrorCode::InvalidInput, "threshold must be negative");
  Mask m(eigs.dims);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = eigs.largest(i) < tau ? 1 : 0;
  return m;
}

Mask combine_scales(std::span<const Mask> masks, std::size_t vote_min) {
  if (masks.empty() || vote_min < 1 || vote_min > masks.size()) {
    throw Error(ErrorCode::InvalidInput, "vote count must lie in [1, number of masks]");
  }
  Mask out(masks[0].dims);
  std::vector<std::uint32_t> votes(out.data.size(), 0);
  for (const auto& m : masks) {
    if (m.dims != out.dims) throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
    for (std::size_t i = 0; i < votes.size(); ++i) votes[i] += m.data[i];
  }
  for (std::size_t i = 0; i < votes.size(); ++i) out.data[i] = votes[i] >= vote_min ? 1 : 0;
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;

  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller provisional label (first seen) stays root
  }
};

}  // namespace

Labeling label_components(const Mask& mask, std::size_t min_voxels, std::size_t margin) {
  const auto [nx, ny, nz] = mask.dims;
  Labeling out;
  out.labels.dims = mask.dims;
  out.labels.data.assign(mask.data.size(), 0);
  auto& lab = out.labels.data;

  // First pass: provisional labels from the 13 already-visited neighbours.
  UnionFind uf;
  uf.make();  // 0 = background
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t i = x + nx * (y + ny * z);
        if (!mask.data[i]) continue;
        std::uint32_t current = 0;
        for (int dz = -1; dz <= 0; ++dz) {
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
              const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
              const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
              const auto zz = static_cast<std::ptrdiff_t>(z) + dz;
              if (xx < 0 || yy < 0 || zz < 0 || xx >= static_cast<std::ptrdiff_t>(nx) ||
                  yy >= static_cast<std::ptrdiff_t>(ny)) {
                continue;
              }
              const std::uint32_t l =
                  lab[static_cast<std::size_t>(xx) + nx * (static_cast<std::size_t>(yy) + ny * static_cast<std::size_t>(zz))];
              if (l == 0) continue;
              if (current == 0) {
                current = l;
              } else if (l != current) {
                uf.unite(current, l);
              }
            }
          }
        }
        lab[i] = current != 0 ? current : uf.make();
      }
    }
  }

  // Second pass: resolve roots and accumulate statistics.
  struct Stats {
    std::size_t count = 0;
    std::size_t first = 0;
    Vec3 sum{};
    std::array<std::size_t, 3> lo{}, hi{};
  };
  std::vector<Stats> stats(uf.parent.size());
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t i = x + nx * (y + ny * z);
        if (lab[i] == 0) continue;
        const std::uint32_t root = uf.find(lab[i]);
        lab[i] = root;
        auto& s = stats[root];
        if (s.count == 0) {
          s.first = i;
          s.lo = {x, y, z};
          s.hi = {x, y, z};
        }
        ++s.count;
        s.sum[0] += static_cast<double>(x);
        s.sum[1] += static_cast<double>(y);
        s.sum[2] += static_cast<double>(z);
        s.lo = {std::min(s.lo[0], x), std::min(s.lo[1], y), std::min(s.lo[2], z)};
        s.hi = {std::max(s.hi[0], x), std::max(s.hi[1], y), std::max(s.hi[2], z)};
      }
    }
  }

  std::vector<std::uint32_t> roots;
  for (std::uint32_t r = 1; r < stats.size(); ++r) {
    if (stats[r].count > 0 && stats[r].count >= min_voxels) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (stats[a].count != stats[b].count) return stats[a].count > stats[b].count;
    return stats[a].first < stats[b].first;
  });

  std::vector<std::uint32_t> relabel(stats.size(), 0);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const auto& s = stats[roots[k]];
    relabel[roots[k]] = static_cast<std::uint32_t>(k + 1);
    SeedRegion r;
    r.label = static_cast<std::uint32_t>(k + 1);
    r.voxel_count = s.count;
    const double n = static_cast<double>(s.count);
    r.centroid = {s.sum[0] / n, s.sum[1] / n, s.sum[2] / n};
    for (int a = 0; a < 3; ++a) {
      r.bbox.lo[a] = s.lo[a] > margin ? s.lo[a] - margin : 0;
      r.bbox.hi[a] = std::min(s.hi[a] + margin, mask.dims[a] - 1);
    }
    out.regions.push_back(r);
  }
  for (auto& l : lab) l = relabel[l];
  return out;
}

double default_eig_threshold(const Volume& v, std::span<const Vec3> sigmas) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v.data) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  double smin = std::numeric_limits<double>::infinity();
  for (const auto& s : sigmas) {
    for (int a = 0; a < 3; ++a) smin = std::min(smin, s[a] * v.spacing[a]);
  }
  const double range = hi > lo ? hi - lo : 1e-12;
  return -0.01 * range / (smin * smin);
}

Detection detect_regions(const Volume& v, const ScaleConfig& cfg) {
  v.validate();
  cfg.validate();
  Detection det;
  det.eig_threshold =
      std::isnan(cfg.eig_threshold) ? default_eig_threshold(v, cfg.sigmas) : cfg.eig_threshold;
  for (const auto& sigma : cfg.sigmas) {
    const Volume smoothed = gaussian_smooth(v, sigma);
    det.scale_masks.push_back(threshold_mask(hessian_eigenvalues(smoothed), det.eig_threshold));
  }
  det.combined = combine_scales(det.scale_masks, cfg.effective_vote());
  det.labeling = label_components(det.combined, cfg.min_voxels, cfg.bbox_margin);
  return det;
}

std::vector<LayerPointSet> extract_layer_points(const Volume& v, const SeedRegion& region,
                                                double intensity_quantile) {
  v.validate();
  if (!(intensity_quantile > 0.0 && intensity_quantile < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "quantile must lie in (0, 1)");
  }
  const auto& b = region.bbox;
  for (int a = 0; a < 3; ++a) {
    if (b.lo[a] > b.hi[a] || b.hi[a] >= v.dims[a]) {
      throw Error(ErrorCode::InvalidInput, "region box lies outside the volume");
    }
  }

  std::vector<double> vals;
  for (std::size_t z = b.lo[2]; z <= b.hi[2]; ++z)
    for (std::size_t y = b.lo[1]; y <= b.hi[1]; ++y)
      for (std::size_t x = b.lo[0]; x <= b.hi[0]; ++x) vals.push_back(v.at(x, y, z));
  const double vmax = *std::max_element(vals.begin(), vals.end());
  // Lower empirical quantile (nearest rank).
  const auto rank = static_cast<std::size_t>(std::floor(intensity_quantile * static_cast<double>(vals.size() - 1)));
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(rank), vals.end());
  const double threshold = vals[rank];
  if (!(vmax > threshold)) {
    throw Error(ErrorCode::EmptyRegion, "no voxel in the region exceeds the intensity quantile");
  }
  const double level = 0.5 * (threshold + vmax);

  std::vector<LayerPointSet> out;
  for (std::size_t z = b.lo[2]; z <= b.hi[2]; ++z) {
    LayerPointSet layer;
    layer.layer_index = static_cast<int>(z);
    const auto emit = [&](double xa, double ya, double va, double xb, double yb, double vb) {
      if ((va >= level) == (vb >= level)) return;
      const double t = (level - va) / (vb - va);
      layer.points.push_back({xa + t * (xb - xa), ya + t * (yb - ya)});
    };
    for (std::size_t y = b.lo[1]; y <= b.hi[1]; ++y) {
      for (std::size_t x = b.lo[0]; x <= b.hi[0]; ++x) {
        const double here = v.at(x, y, z);
        const auto fx = static_cast<double>(x);
        const auto fy = static_cast<double>(y);
        if (x < b.hi[0]) emit(fx, fy, here, fx + 1.0, fy, v.at(x + 1, y, z));
        if (y < b.hi[1]) emit(fx, fy, here, fx, fy + 1.0, v.at(x, y + 1, z));
      }
    }
    if (!layer.points.empty()) out.push_back(std::move(layer));
  }
  return out;
}

}  // namespace stackfit
