#include <cmath>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "stackfit/imageio.hpp"
#include "stackfit/preprocess.hpp"

namespace stackfit::cli {
namespace {

struct PreprocessArgs {
  std::string volume_dir;
  std::string meta;
  std::string sigmas = "1;2;4";
  double tau = std::nan("");
  std::size_t vote = 0;
  std::size_t min_voxels = 8;
  std::size_t margin = 2;
  double quantile = 0.5;
  std::string out;
  std::size_t jobs = 1;
};

int run(const PreprocessArgs& a) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(a.volume_dir)) throw Exit{kUsage, "volume directory not found: " + a.volume_dir};
  if (!(a.quantile > 0.0 && a.quantile < 1.0)) throw Exit{kUsage, "--quantile must lie in (0, 1)"};

  ScaleConfig sc;
  sc.sigmas = parse_sigmas(a.sigmas);
  sc.eig_threshold = a.tau;
  sc.vote_min = a.vote;
  sc.min_voxels = a.min_voxels;
  sc.bbox_margin = a.margin;
  sc.validate();

  const fs::path meta_path = a.meta.empty() ? fs::path(a.volume_dir) / "volume.meta" : fs::path(a.meta);
  const auto meta = io::read_volume_meta(meta_path);
  const Volume vol = io::read_volume_dir(a.volume_dir, meta);
  std::cerr << "volume " << vol.dims[0] << "x" << vol.dims[1] << "x" << vol.dims[2] << ", "
            << sc.sigmas.size() << " scales\n";

  const Detection det = detect_regions(vol, sc);
  std::cerr << "eigenvalue cutoff " << io::format_number(det.eig_threshold) << ", foreground voxels "
            << det.combined.count() << "\n";

  const fs::path out(a.out);
  fs::create_directories(out / "points");
  io::write_file_atomic(out / "regions.csv", io::format_regions_csv(det.labeling.regions));
  io::write_label_dir(out / "labels", det.labeling.labels, vol.spacing);

  const auto& regions = det.labeling.regions;
  parallel_for(regions.size(), a.jobs, [&](std::size_t i) {
    const auto& r = regions[i];
    const fs::path file = out / "points" / ("region_" + std::to_string(r.label) + ".csv");
    try {
      const auto layers = extract_layer_points(vol, r, a.quantile);
      io::write_file_atomic(file, io::format_points_csv(layers));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyRegion) throw;
      std::cerr << "region " << r.label << ": no points (" << e.what() << ")\n";
    }
  });

  std::cout << "regions: " << regions.size() << "\n";
  if (regions.empty()) throw Exit{kEmpty, "no regions detected"};
  return kOk;
}

}  // namespace

std::function<int()> register_preprocess(CLI::App& app) {
  auto a = std::make_shared<PreprocessArgs>();
  auto* sub = app.add_subcommand("preprocess", "Detect objects in a volume and extract per-layer points");
  sub->add_option("--volume", a->volume_dir, "Slice directory")->required();
  sub->add_option("--meta", a->meta, "Meta file (default <volume>/volume.meta)");
  sub->add_option("--sigmas", a->sigmas, "Scales, ';'-separated; each 1 or 3 values (voxels)")
      ->capture_default_str();
  sub->add_option("--tau", a->tau, "Eigenvalue cutoff (< 0; default scales with intensity range)");
  sub->add_option("--vote", a->vote, "Scales that must agree (default ceil(n/2))");
  sub->add_option("--min-voxels", a->min_voxels, "Smallest kept component")->capture_default_str();
  sub->add_option("--margin", a->margin, "Bounding-box margin in voxels")->capture_default_str();
  sub->add_option("--quantile", a->quantile, "Intensity quantile for point extraction")->capture_default_str();
  sub->add_option("--out", a->out, "Output directory")->required();
  add_jobs_option(*sub, a->jobs);
  add_config_option(*sub);
  return [a] { return run(*a); };
}

}  // namespace stackfit::cli
