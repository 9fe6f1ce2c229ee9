#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stackfit/fitting.hpp"
#include "stackfit/preprocess.hpp"
#include "stackfit/synth.hpp"
#include "stackfit/volume.hpp"

namespace stackfit::io {

namespace fs = std::filesystem;

/// One grayscale image; samples row-major, maxval 255 or 65535.
struct Slice2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> samples;
};

/// Binary PGM (P5) only. Header "P5 <w> <h> <maxval>" with arbitrary
/// whitespace and '#' comments, then exactly one whitespace byte, then
/// samples (1 byte each for maxval 255, 2 bytes big-endian for 65535).
/// Errors: UnsupportedFormat (other magic), MalformedHeader,
/// UnsupportedMaxval, TruncatedData.
Slice2D decode_pgm(std::span<const std::uint8_t> bytes);
/// Writes "P5\n<w> <h>\n<maxval>\n" followed by the samples.
std::vector<std::uint8_t> encode_pgm(const Slice2D& slice);

Slice2D read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const Slice2D& slice);

/// Meta file, `key: value` lines:
///   dims: nx ny nz
///   spacing: sx sy sz
///   bit_depth: 8 | 16
///   pattern: slice_%03d.pgm   (exactly one %d conversion, optional 0-flag and width)
struct VolumeMeta {
  Dims3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};
  int bit_depth = 16;
  std::string pattern = "slice_%04d.pgm";
};

VolumeMeta read_volume_meta(const fs::path& path);
void write_volume_meta(const fs::path& path, const VolumeMeta& meta);
std::string slice_filename(const std::string& pattern, std::size_t z);

/// Assembles slices z = 0..nz-1. Errors: MissingSlice (naming the path),
/// DimensionMismatch.
Volume read_volume_dir(const fs::path& dir, const VolumeMeta& meta);
/// Writes slices and `volume.meta`. Intensities are rounded to the nearest
/// integer and clamped to [0, maxval].
void write_volume_dir(const fs::path& dir, const Volume& v, VolumeMeta meta);
void write_label_dir(const fs::path& dir, const LabelVolume& labels, const Vec3& spacing);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view content);

/// %.12g
std::string format_number(double v);

// -- fits CSV: object,layer,a,b,c,d,e,f,cx,cy,rx,ry,angle,loss,is_ellipse

struct FitRow {
  std::string object;
  int layer = 0;
  Vec6 theta{};
  bool has_geometry = false;
  GeometricEllipse ellipse;
  double loss = 0.0;
  bool is_ellipse = false;
};

struct ObjectFit {
  std::string object;
  StackFitResult result;
};

std::string format_fits_csv(std::span<const ObjectFit> fits);
void write_fits_csv(const fs::path& path, std::span<const ObjectFit> fits);
std::vector<FitRow> parse_fits_csv(const std::string& text);
std::vector<FitRow> read_fits_csv(const fs::path& path);

// -- points CSV: layer,x,y

std::string format_points_csv(std::span<const LayerPointSet> layers);
std::vector<LayerPointSet> parse_points_csv(const std::string& text);
std::vector<LayerPointSet> read_points_csv(const fs::path& path);

// -- regions CSV: label,x0,x1,y0,y1,z0,z1,cx,cy,cz,voxels

std::string format_regions_csv(std::span<const SeedRegion> regions);

// -- bench CSV: noise_count,err_squared,err_robust ("error" marks a failed fit)

std::string format_bench_csv(std::span<const BenchRecord> records);

// -- SVG diagnostics

/// Slice embedded as a grayscale BMP data URI, each ellipse as a rotated
/// <ellipse> element in pixel coordinates (pixel centers at integer coords).
std::string render_overlay_svg(const Slice2D& slice, std::span<const GeometricEllipse> fits);
void render_overlay_svg(const Slice2D& slice, std::span<const GeometricEllipse> fits,
                        const fs::path& path);

/// Error versus contamination count: two polylines (squared, robust), axes, legend.
std::string render_bench_svg(std::span<const BenchRecord> records);
void render_bench_svg(std::span<const BenchRecord> records, const fs::path& path);

/// Extracts slice z of a volume as 8-bit, linearly scaled to its own range.
Slice2D volume_slice_8bit(const Volume& v, std::size_t z);

}  // namespace stackfit::io
