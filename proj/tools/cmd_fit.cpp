#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "stackfit/imageio.hpp"

namespace stackfit::cli {
namespace {

namespace fs = std::filesystem;

struct FitArgs {
  std::string points;
  std::string loss = "robust";
  double epsilon = 0.1;
  double lambda = 1.0;
  bool no_normalize = false;
  std::string out;
  std::string overlay;
  std::string volume;
  std::size_t jobs = 1;
};

struct Object {
  std::string id;
  std::vector<LayerPointSet> layers;
};

std::vector<Object> load_objects(const fs::path& p) {
  std::vector<Object> objs;
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) objs.push_back({f.stem().string(), io::read_points_csv(f)});
  } else if (fs::is_regular_file(p)) {
    objs.push_back({p.stem().string(), io::read_points_csv(p)});
  } else {
    throw Exit{kUsage, "points input not found: " + p.string()};
  }
  return objs;
}

// Background for one layer: the volume slice when available, otherwise a
// blank canvas covering the points. Returns the pixel offset applied to
// fitted ellipses.
io::Slice2D overlay_canvas(const Volume* vol, const LayerPointSet& layer, Vec2& shift) {
  if (vol && layer.layer_index >= 0 && static_cast<std::size_t>(layer.layer_index) < vol->dims[2]) {
    shift = {0.0, 0.0};
    return io::volume_slice_8bit(*vol, static_cast<std::size_t>(layer.layer_index));
  }
  double x0 = layer.points[0][0], x1 = x0, y0 = layer.points[0][1], y1 = y0;
  for (const auto& p : layer.points) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  const double span = std::max(x1 - x0, y1 - y0);
  const double margin = 0.1 * span + 2.0;
  shift = {margin - x0, margin - y0};
  io::Slice2D s;
  s.width = static_cast<std::size_t>(std::ceil(x1 - x0 + 2 * margin)) + 1;
  s.height = static_cast<std::size_t>(std::ceil(y1 - y0 + 2 * margin)) + 1;
  s.maxval = 255;
  s.samples.assign(s.width * s.height, 0);
  return s;
}

int run(const FitArgs& a) {
  FitConfig cfg;
  if (a.loss == "robust") {
    cfg.loss = Loss::Robust;
  } else if (a.loss == "squared") {
    cfg.loss = Loss::Squared;
  } else {
    throw Exit{kUsage, "--loss must be robust or squared"};
  }
  cfg.epsilon = a.epsilon;
  cfg.lambda = a.lambda;
  cfg.normalize_coords = !a.no_normalize;
  cfg.validate();

  const auto objects = load_objects(a.points);
  if (objects.empty()) throw Exit{kEmpty, "no point files found in " + a.points};
  for (const auto& o : objects) {
    if (o.layers.empty()) throw Exit{kUsage, "no points in object " + o.id};
  }

  Volume vol;
  if (!a.volume.empty()) vol = io::read_volume_dir(a.volume, io::read_volume_meta(fs::path(a.volume) / "volume.meta"));

  std::vector<io::ObjectFit> fits(objects.size());
  parallel_for(objects.size(), a.jobs, [&](std::size_t i) {
    fits[i] = {objects[i].id, fit_stack(objects[i].layers, cfg)};
  });

  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& r = fits[i].result;
    std::size_t ellipses = 0;
    for (const auto& l : r.layers) ellipses += l.is_ellipse ? 1 : 0;
    std::cerr << "object " << fits[i].object << ": layers " << r.layers.size() << ", ellipses " << ellipses
              << ", objective " << io::format_number(r.objective_value) << ", max_coupling_l1 "
              << io::format_number(r.max_coupling_l1()) << ", total_coupling_l1 "
              << io::format_number(r.total_coupling_l1()) << "\n";
  }
  io::write_fits_csv(a.out, fits);

  if (!a.overlay.empty()) {
    parallel_for(objects.size(), a.jobs, [&](std::size_t i) {
      const auto& obj = objects[i];
      for (std::size_t l = 0; l < obj.layers.size(); ++l) {
        const auto& layer = obj.layers[l];
        const auto& lf = fits[i].result.layers[l];
        Vec2 shift{};
        const io::Slice2D canvas = overlay_canvas(a.volume.empty() ? nullptr : &vol, layer, shift);
        std::vector<GeometricEllipse> drawn;
        if (lf.ellipse) {
          GeometricEllipse e = *lf.ellipse;
          e.center = {e.center[0] + shift[0], e.center[1] + shift[1]};
          drawn.push_back(e);
        }
        const auto file = fs::path(a.overlay) / (obj.id + "_z" + std::to_string(layer.layer_index) + ".svg");
        io::render_overlay_svg(canvas, drawn, file);
      }
    });
  }

  std::cout << "objects: " << fits.size() << "\n";
  return kOk;
}

}  // namespace

std::function<int()> register_fit(CLI::App& app) {
  auto a = std::make_shared<FitArgs>();
  auto* sub = app.add_subcommand("fit", "Fit ellipse stacks to per-layer point sets");
  sub->add_option("--points", a->points, "Points CSV, or a directory of them (one object per file)")->required();
  sub->add_option("--loss", a->loss, "robust | squared")->capture_default_str();
  sub->add_option("--epsilon", a->epsilon, "Dead-zone half width (fitting frame)")->capture_default_str();
  sub->add_option("--lambda", a->lambda, "Layer coupling weight")->capture_default_str();
  sub->add_flag("--no-normalize", a->no_normalize, "Fit in input coordinates");
  sub->add_option("--out", a->out, "Fits CSV")->required();
  sub->add_option("--overlay", a->overlay, "Directory for per-layer SVG overlays");
  sub->add_option("--volume", a->volume, "Slice directory used as overlay background");
  add_jobs_option(*sub, a->jobs);
  add_config_option(*sub);
  return [a] { return run(*a); };
}

}  // namespace stackfit::cli
