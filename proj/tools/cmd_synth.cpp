#include <iostream>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "stackfit/imageio.hpp"
#include "stackfit/keyvalue.hpp"
#include "stackfit/synth.hpp"

namespace stackfit::cli {
namespace {

struct VolumeArgs {
  std::string dims = "64 64 32";
  std::string spacing = "1 1 1";
  std::vector<std::string> blobs;       // "cx cy cz sx sy sz amp"
  std::vector<std::string> ellipsoids;  // "cx cy cz ax ay az amp"
  double noise = 0.0;
  std::uint64_t seed = 42;
  int bit_depth = 16;
  int supersample = 4;
  std::string out;
};

struct StackArgs {
  std::string center = "0 0 0";
  std::string axes = "10 8 6";
  int z_first = -10;
  int z_last = 10;
  std::size_t points_per_layer = 40;
  double jitter = 0.0;
  std::uint64_t seed = 42;
  std::string out;
};

struct PointsArgs {
  std::string center = "0 0";
  std::string axes = "1.5 0.8";
  double rotation = 0.0;
  std::size_t n_inliers = 50;
  double jitter = 0.0;
  double noise_lo = -3.0;
  double noise_hi = 3.0;
  std::size_t noise_count = 0;
  std::uint64_t seed = 42;
  int layer = 0;
  std::string out;
};

std::vector<double> fixed_list(const std::string& text, std::size_t n, const std::string& what) {
  const auto v = parse_number_list(text);
  if (v.size() != n) throw Exit{kUsage, what + " needs " + std::to_string(n) + " values: '" + text + "'"};
  return v;
}

int run_volume(const VolumeArgs& a) {
  const Dims3 dims = parse_dims(a.dims);
  const Vec3 spacing = parse_vec3(a.spacing, "--spacing");
  if (a.bit_depth != 8 && a.bit_depth != 16) throw Exit{kUsage, "--bit-depth must be 8 or 16"};
  std::vector<GaussianBlob> blobs;
  for (const auto& b : a.blobs) {
    const auto v = fixed_list(b, 7, "--blob");
    blobs.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]});
  }
  Volume vol = synth_volume(blobs, dims, a.noise, a.seed, spacing);
  for (const auto& e : a.ellipsoids) {
    const auto v = fixed_list(e, 7, "--ellipsoid");
    const Volume r = render_ellipsoid(dims, {v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6], a.supersample, spacing);
    for (std::size_t i = 0; i < vol.data.size(); ++i) vol.data[i] += r.data[i];
  }
  io::VolumeMeta meta;
  meta.bit_depth = a.bit_depth;
  io::write_volume_dir(a.out, vol, meta);
  std::cerr << "wrote " << dims[2] << " slices to " << a.out << "\n";
  return kOk;
}

int run_stack(const StackArgs& a) {
  const auto c = fixed_list(a.center, 3, "--center");
  const auto ax = fixed_list(a.axes, 3, "--axes");
  const auto layers = synth_stack({c[0], c[1], c[2]}, {ax[0], ax[1], ax[2]}, a.z_first, a.z_last,
                                  a.points_per_layer, a.jitter, a.seed);
  if (layers.empty()) throw Exit{kEmpty, "no layer in the z range cuts the ellipsoid"};
  io::write_file_atomic(a.out, io::format_points_csv(layers));
  std::cerr << "wrote " << layers.size() << " layers to " << a.out << "\n";
  return kOk;
}

int run_points(const PointsArgs& a) {
  const auto c = fixed_list(a.center, 2, "--center");
  const auto ax = fixed_list(a.axes, 2, "--axes");
  if (!(a.noise_lo < a.noise_hi)) throw Exit{kUsage, "--noise-lo must be below --noise-hi"};
  const GeometricEllipse truth{{c[0], c[1]}, {ax[0], ax[1]}, a.rotation};
  Xorshift64Star rng(a.seed);
  LayerPointSet layer{a.layer, sample_ellipse_points(truth, a.n_inliers, a.jitter, rng)};
  Xorshift64Star noise_rng(derive_seed(a.seed, a.noise_count));
  for (const auto& p : sample_uniform_noise(a.noise_count, a.noise_lo, a.noise_hi, noise_rng)) {
    layer.points.push_back(p);
  }
  io::write_file_atomic(a.out, io::format_points_csv(std::span(&layer, 1)));
  return kOk;
}

}  // namespace

std::function<int()> register_synth(CLI::App& app) {
  auto* sub = app.add_subcommand("synth", "Generate fixtures");
  sub->require_subcommand(1);

  auto va = std::make_shared<VolumeArgs>();
  auto* vol = sub->add_subcommand("volume", "Gaussian blobs and/or solid ellipsoids as a slice directory");
  vol->add_option("--dims", va->dims, "nx ny nz")->capture_default_str();
  vol->add_option("--spacing", va->spacing, "sx sy sz")->capture_default_str();
  vol->add_option("--blob", va->blobs, "'cx cy cz sx sy sz amplitude' (repeatable)");
  vol->add_option("--ellipsoid", va->ellipsoids, "'cx cy cz ax ay az amplitude' (repeatable)");
  vol->add_option("--noise", va->noise, "Uniform noise amplitude")->capture_default_str();
  vol->add_option("--seed", va->seed, "RNG seed")->capture_default_str();
  vol->add_option("--bit-depth", va->bit_depth, "8 or 16")->capture_default_str();
  vol->add_option("--supersample", va->supersample, "Ellipsoid in-plane supersampling")->capture_default_str();
  vol->add_option("--out", va->out, "Output directory")->required();
  add_config_option(*vol);

  auto sa = std::make_shared<StackArgs>();
  auto* st = sub->add_subcommand("stack", "Points on the cross-sections of an ellipsoid");
  st->add_option("--center", sa->center, "cx cy cz")->capture_default_str();
  st->add_option("--axes", sa->axes, "ax ay az")->capture_default_str();
  st->add_option("--z-first", sa->z_first, "First layer")->capture_default_str();
  st->add_option("--z-last", sa->z_last, "Last layer")->capture_default_str();
  st->add_option("--points-per-layer", sa->points_per_layer, "Points on the widest layer")->capture_default_str();
  st->add_option("--jitter", sa->jitter, "Gaussian jitter sigma")->capture_default_str();
  st->add_option("--seed", sa->seed, "RNG seed")->capture_default_str();
  st->add_option("--out", sa->out, "Points CSV")->required();
  add_config_option(*st);

  auto pa = std::make_shared<PointsArgs>();
  auto* pt = sub->add_subcommand("points", "One contaminated ellipse sample, as used by bench-robust");
  pt->add_option("--center", pa->center, "x y")->capture_default_str();
  pt->add_option("--axes", pa->axes, "rx ry")->capture_default_str();
  pt->add_option("--rotation", pa->rotation, "Radians")->capture_default_str();
  pt->add_option("--n-inliers", pa->n_inliers, "Points on the ellipse")->capture_default_str();
  pt->add_option("--jitter", pa->jitter, "Inlier jitter sigma")->capture_default_str();
  pt->add_option("--noise-lo", pa->noise_lo, "Contamination interval start")->capture_default_str();
  pt->add_option("--noise-hi", pa->noise_hi, "Contamination interval end")->capture_default_str();
  pt->add_option("--noise-count", pa->noise_count, "Contaminating points")->capture_default_str();
  pt->add_option("--seed", pa->seed, "RNG seed")->capture_default_str();
  pt->add_option("--layer", pa->layer, "Layer index written to the CSV")->capture_default_str();
  pt->add_option("--out", pa->out, "Points CSV")->required();
  add_config_option(*pt);

  return [vol, st, va, sa, pa] {
    if (vol->parsed()) return run_volume(*va);
    if (st->parsed()) return run_stack(*sa);
    return run_points(*pa);
  };
}

}  // namespace stackfit::cli
