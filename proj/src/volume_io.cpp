#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>

#include "stackfit/error.hpp"
#include "stackfit/imageio.hpp"
#include "stackfit/keyvalue.hpp"

namespace stackfit::io {

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename into " + path.string() + ": " + ec.message());
}

std::string slice_filename(const std::string& pattern, std::size_t z) {
  static const std::regex valid(R"(^[^%]*%0?[0-9]{0,2}d[^%]*$)");
  if (!std::regex_match(pattern, valid)) {
    throw Error(ErrorCode::MalformedHeader, "slice pattern needs exactly one %d conversion: '" + pattern + "'");
  }
  char buf[512];
  const int n = std::snprintf(buf, sizeof buf, pattern.c_str(), static_cast<int>(z));
  if (n < 0 || static_cast<std::size_t>(n) >= sizeof buf) {
    throw Error(ErrorCode::MalformedHeader, "slice pattern too long");
  }
  return buf;
}

VolumeMeta read_volume_meta(const fs::path& path) {
  const auto kv = KeyValueFile::load(path);
  VolumeMeta m;
  const auto dims = kv.get_doubles("dims");
  if (dims.size() != 3) throw Error(ErrorCode::MalformedHeader, "dims needs three values");
  for (int a = 0; a < 3; ++a) {
    if (!(dims[a] >= 1.0) || dims[a] != std::floor(dims[a])) {
      throw Error(ErrorCode::MalformedHeader, "dims must be positive integers");
    }
    m.dims[a] = static_cast<std::size_t>(dims[a]);
  }
  if (kv.has("spacing")) {
    const auto sp = kv.get_doubles("spacing");
    if (sp.size() != 3) throw Error(ErrorCode::MalformedHeader, "spacing needs three values");
    for (int a = 0; a < 3; ++a) {
      if (!(sp[a] > 0.0)) throw Error(ErrorCode::MalformedHeader, "spacing must be positive");
      m.spacing[a] = sp[a];
    }
  }
  if (kv.has("bit_depth")) {
    m.bit_depth = static_cast<int>(kv.get_int("bit_depth"));
    if (m.bit_depth != 8 && m.bit_depth != 16) {
      throw Error(ErrorCode::MalformedHeader, "bit_depth must be 8 or 16");
    }
  }
  m.pattern = kv.require("pattern");
  slice_filename(m.pattern, 0);
  return m;
}

void write_volume_meta(const fs::path& path, const VolumeMeta& meta) {
  KeyValueFile kv;
  kv.set("dims", std::to_string(meta.dims[0]) + " " + std::to_string(meta.dims[1]) + " " +
                     std::to_string(meta.dims[2]));
  kv.set("spacing", format_number(meta.spacing[0]) + " " + format_number(meta.spacing[1]) + " " +
                        format_number(meta.spacing[2]));
  kv.set("bit_depth", std::to_string(meta.bit_depth));
  kv.set("pattern", meta.pattern);
  write_file_atomic(path, kv.to_string());
}

Volume read_volume_dir(const fs::path& dir, const VolumeMeta& meta) {
  Volume v(meta.dims, meta.spacing);
  const auto [nx, ny, nz] = meta.dims;
  for (std::size_t z = 0; z < nz; ++z) {
    const fs::path p = dir / slice_filename(meta.pattern, z);
    if (!fs::exists(p)) throw Error(ErrorCode::MissingSlice, "missing slice " + p.string());
    const Slice2D s = read_pgm(p);
    if (s.width != nx || s.height != ny) {
      throw Error(ErrorCode::DimensionMismatch, p.string() + " is " + std::to_string(s.width) + "x" +
                                                    std::to_string(s.height) + ", meta says " +
                                                    std::to_string(nx) + "x" + std::to_string(ny));
    }
    for (std::size_t i = 0; i < nx * ny; ++i) v.data[z * nx * ny + i] = s.samples[i];
  }
  return v;
}

void write_volume_dir(const fs::path& dir, const Volume& v, VolumeMeta meta) {
  v.validate();
  meta.dims = v.dims;
  meta.spacing = v.spacing;
  const auto [nx, ny, nz] = v.dims;
  const double maxval = meta.bit_depth == 8 ? 255.0 : 65535.0;
  fs::create_directories(dir);
  for (std::size_t z = 0; z < nz; ++z) {
    Slice2D s;
    s.width = nx;
    s.height = ny;
    s.maxval = static_cast<std::uint32_t>(maxval);
    s.samples.resize(nx * ny);
    for (std::size_t i = 0; i < nx * ny; ++i) {
      s.samples[i] = static_cast<std::uint16_t>(std::clamp(std::round(v.data[z * nx * ny + i]), 0.0, maxval));
    }
    write_pgm(dir / slice_filename(meta.pattern, z), s);
  }
  write_volume_meta(dir / "volume.meta", meta);
}

void write_label_dir(const fs::path& dir, const LabelVolume& labels, const Vec3& spacing) {
  Volume v(labels.dims, spacing);
  for (std::size_t i = 0; i < labels.data.size(); ++i) {
    if (labels.data[i] > 65535) throw Error(ErrorCode::InvalidInput, "more than 65535 labels");
    v.data[i] = labels.data[i];
  }
  VolumeMeta meta;
  meta.bit_depth = 16;
  meta.pattern = "labels_%04d.pgm";
  write_volume_dir(dir, v, meta);
}

}  // namespace stackfit::io
