#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "stackfit/error.hpp"
#include "stackfit/imageio.hpp"

namespace stackfit::io {
namespace {

constexpr const char* kFitsHeader = "object,layer,a,b,c,d,e,f,cx,cy,rx,ry,angle,loss,is_ellipse";
constexpr const char* kPointsHeader = "layer,x,y";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int lineno) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidInput, "line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, int lineno) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidInput, "line " + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
  return v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_fits_csv(std::span<const ObjectFit> fits) {
  std::string out = std::string(kFitsHeader) + "\n";
  for (const auto& obj : fits) {
    if (obj.object.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::InvalidInput, "object id may not contain ',' or newlines");
    }
    for (const auto& lf : obj.result.layers) {
      out += obj.object + "," + std::to_string(lf.layer_index);
      for (double v : lf.conic.theta) out += "," + format_number(v);
      if (lf.ellipse) {
        const auto& e = *lf.ellipse;
        for (double v : {e.center[0], e.center[1], e.semi_axes[0], e.semi_axes[1], e.rotation}) {
          out += "," + format_number(v);
        }
      } else {
        out += ",,,,,";
      }
      out += "," + format_number(lf.loss) + "," + (lf.is_ellipse ? "1" : "0") + "\n";
    }
  }
  return out;
}

void write_fits_csv(const fs::path& path, std::span<const ObjectFit> fits) {
  write_file_atomic(path, format_fits_csv(fits));
}

std::vector<FitRow> parse_fits_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || split(line) != split(kFitsHeader)) {
    throw Error(ErrorCode::MalformedHeader, "fits CSV header mismatch");
  }
  std::vector<FitRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 15) throw Error(ErrorCode::InvalidInput, "line " + std::to_string(lineno) + ": expected 15 fields");
    FitRow r;
    r.object = f[0];
    r.layer = parse_int(f[1], lineno);
    for (int j = 0; j < 6; ++j) r.theta[j] = parse_double(f[2 + j], lineno);
    r.has_geometry = !f[8].empty();
    if (r.has_geometry) {
      r.ellipse.center = {parse_double(f[8], lineno), parse_double(f[9], lineno)};
      r.ellipse.semi_axes = {parse_double(f[10], lineno), parse_double(f[11], lineno)};
      r.ellipse.rotation = parse_double(f[12], lineno);
    }
    r.loss = parse_double(f[13], lineno);
    r.is_ellipse = f[14] == "1";
    rows.push_back(r);
  }
  return rows;
}

std::vector<FitRow> read_fits_csv(const fs::path& path) { return parse_fits_csv(read_text(path)); }

std::string format_points_csv(std::span<const LayerPointSet> layers) {
  std::string out = std::string(kPointsHeader) + "\n";
  for (const auto& layer : layers) {
    for (const auto& p : layer.points) {
      out += std::to_string(layer.layer_index) + "," + format_number(p[0]) + "," + format_number(p[1]) + "\n";
    }
  }
  return out;
}

std::vector<LayerPointSet> parse_points_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || split(line) != split(kPointsHeader)) {
    throw Error(ErrorCode::MalformedHeader, "points CSV must start with 'layer,x,y'");
  }
  std::map<int, LayerPointSet> by_layer;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 3) throw Error(ErrorCode::InvalidInput, "line " + std::to_string(lineno) + ": expected 3 fields");
    const int layer = parse_int(f[0], lineno);
    const Vec2 p{parse_double(f[1], lineno), parse_double(f[2], lineno)};
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw Error(ErrorCode::InvalidInput, "line " + std::to_string(lineno) + ": non-finite coordinate");
    }
    auto& ls = by_layer[layer];
    ls.layer_index = layer;
    ls.points.push_back(p);
  }
  std::vector<LayerPointSet> out;
  for (auto& [k, v] : by_layer) out.push_back(std::move(v));
  return out;
}

std::vector<LayerPointSet> read_points_csv(const fs::path& path) {
  return parse_points_csv(read_text(path));
}

std::string format_regions_csv(std::span<const SeedRegion> regions) {
  std::string out = "label,x0,x1,y0,y1,z0,z1,cx,cy,cz,voxels\n";
  for (const auto& r : regions) {
    out += std::to_string(r.label);
    for (int a = 0; a < 3; ++a) {
      out += "," + std::to_string(r.bbox.lo[a]) + "," + std::to_string(r.bbox.hi[a]);
    }
    for (double c : r.centroid) out += "," + format_number(c);
    out += "," + std::to_string(r.voxel_count) + "\n";
  }
  return out;
}

std::string format_bench_csv(std::span<const BenchRecord> records) {
  std::string out = "noise_count,err_squared,err_robust\n";
  for (const auto& r : records) {
    out += std::to_string(r.noise_count) + "," +
           (r.squared_error_message ? std::string("error") : format_number(r.err_squared)) + "," +
           (r.robust_error_message ? std::string("error") : format_number(r.err_robust)) + "\n";
  }
  return out;
}

}  // namespace stackfit::io
