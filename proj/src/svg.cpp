#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stackfit/error.hpp"
#include "stackfit/imageio.hpp"

namespace stackfit::io {
namespace {

void put_le(std::vector<std::uint8_t>& b, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

// 8-bit palettized BMP, bottom-up rows padded to 4 bytes.
std::vector<std::uint8_t> encode_bmp_gray(const Slice2D& s) {
  const std::uint32_t w = static_cast<std::uint32_t>(s.width);
  const std::uint32_t h = static_cast<std::uint32_t>(s.height);
  const std::uint32_t stride = (w + 3) & ~3U;
  const std::uint32_t offset = 14 + 40 + 256 * 4;
  std::vector<std::uint8_t> b;
  b.reserve(offset + stride * h);
  b.push_back('B');
  b.push_back('M');
  put_le(b, offset + stride * h, 4);
  put_le(b, 0, 4);
  put_le(b, offset, 4);
  put_le(b, 40, 4);
  put_le(b, w, 4);
  put_le(b, h, 4);
  put_le(b, 1, 2);
  put_le(b, 8, 2);
  put_le(b, 0, 4);
  put_le(b, stride * h, 4);
  put_le(b, 2835, 4);
  put_le(b, 2835, 4);
  put_le(b, 256, 4);
  put_le(b, 0, 4);
  for (std::uint32_t i = 0; i < 256; ++i) {
    b.push_back(static_cast<std::uint8_t>(i));
    b.push_back(static_cast<std::uint8_t>(i));
    b.push_back(static_cast<std::uint8_t>(i));
    b.push_back(0);
  }
  const double scale = 255.0 / std::max<std::uint32_t>(s.maxval, 1);
  for (std::uint32_t r = 0; r < h; ++r) {
    const std::size_t y = h - 1 - r;
    for (std::uint32_t x = 0; x < w; ++x) {
      b.push_back(static_cast<std::uint8_t>(std::lround(s.samples[y * w + x] * scale)));
    }
    for (std::uint32_t p = w; p < stride; ++p) b.push_back(0);
  }
  return b;
}

std::string base64(const std::vector<std::uint8_t>& in) {
  static constexpr char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    const std::uint32_t v = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += tbl[(v >> 6) & 63];
    out += tbl[v & 63];
  }
  if (i < in.size()) {
    std::uint32_t v = in[i] << 16;
    if (i + 1 < in.size()) v |= in[i + 1] << 8;
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += i + 1 < in.size() ? tbl[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string num(double v) { return format_number(v); }

}  // namespace

std::string render_overlay_svg(const Slice2D& slice, std::span<const GeometricEllipse> fits) {
  if (slice.samples.size() != slice.width * slice.height) {
    throw Error(ErrorCode::DimensionMismatch, "slice sample count does not match its size");
  }
  const std::string w = std::to_string(slice.width);
  const std::string h = std::to_string(slice.height);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"-0.5 -0.5 " + w + " " + h + "\">\n";
  out += "<image x=\"-0.5\" y=\"-0.5\" width=\"" + w + "\" height=\"" + h +
         "\" style=\"image-rendering:pixelated\" href=\"data:image/bmp;base64," +
         base64(encode_bmp_gray(slice)) + "\"/>\n";
  for (const auto& e : fits) {
    const double deg = e.rotation * 180.0 / std::numbers::pi;
    out += "<ellipse cx=\"" + num(e.center[0]) + "\" cy=\"" + num(e.center[1]) + "\" rx=\"" +
           num(e.semi_axes[0]) + "\" ry=\"" + num(e.semi_axes[1]) + "\" transform=\"rotate(" + num(deg) +
           " " + num(e.center[0]) + " " + num(e.center[1]) +
           ")\" fill=\"none\" stroke=\"#ff3030\" stroke-width=\"0.3\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void render_overlay_svg(const Slice2D& slice, std::span<const GeometricEllipse> fits, const fs::path& path) {
  write_file_atomic(path, render_overlay_svg(slice, fits));
}

std::string render_bench_svg(std::span<const BenchRecord> records) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 20, B = 50;
  double xmax = 1.0, ymax = 0.0;
  for (const auto& r : records) {
    xmax = std::max(xmax, static_cast<double>(r.noise_count));
    for (double v : {r.err_squared, r.err_robust}) {
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;
  const auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  const auto py = [&](double y) { return H - B - (H - T - B) * std::min(y, ymax) / ymax; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                    "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmax * i / 4.0, yv = ymax * i / 4.0;
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" + num(xv) +
           "</text>\n";
    out += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
           num(std::round(yv * 1000.0) / 1000.0) + "</text>\n";
  }
  out += "<text x=\"" + num((L + W - R) / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\">contaminating points</text>\n";
  out += "<text x=\"16\" y=\"" + num((T + H - B) / 2) + "\" transform=\"rotate(-90 16 " + num((T + H - B) / 2) +
         ")\" text-anchor=\"middle\">parameter error</text>\n";

  const auto polyline = [&](auto get, const char* color) {
    std::string pts;
    for (const auto& r : records) {
      const double v = get(r);
      if (!std::isfinite(v)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(static_cast<double>(r.noise_count))) + "," + num(py(v));
    }
    if (pts.empty()) return std::string();
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts +
           "\"/>\n";
  };
  out += polyline([](const BenchRecord& r) { return r.err_squared; }, "#d62728");
  out += polyline([](const BenchRecord& r) { return r.err_robust; }, "#1f77b4");
  const double lx = W - R + 15;
  out += "<line x1=\"" + num(lx) + "\" y1=\"40\" x2=\"" + num(lx + 20) + "\" y2=\"40\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  out += "<text x=\"" + num(lx + 26) + "\" y=\"44\">squared</text>\n";
  out += "<line x1=\"" + num(lx) + "\" y1=\"60\" x2=\"" + num(lx + 20) + "\" y2=\"60\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  out += "<text x=\"" + num(lx + 26) + "\" y=\"64\">robust</text>\n";
  out += "</svg>\n";
  return out;
}

void render_bench_svg(std::span<const BenchRecord> records, const fs::path& path) {
  write_file_atomic(path, render_bench_svg(records));
}

Slice2D volume_slice_8bit(const Volume& v, std::size_t z) {
  const auto [nx, ny, nz] = v.dims;
  if (z >= nz) throw Error(ErrorCode::InvalidInput, "slice index out of range");
  const auto first = v.data.begin() + static_cast<std::ptrdiff_t>(z * nx * ny);
  const auto last = first + static_cast<std::ptrdiff_t>(nx * ny);
  const auto [mn, mx] = std::minmax_element(first, last);
  const double lo = *mn, range = *mx - *mn;
  Slice2D s;
  s.width = nx;
  s.height = ny;
  s.maxval = 255;
  s.samples.resize(nx * ny);
  for (std::size_t i = 0; i < nx * ny; ++i) {
    s.samples[i] = range > 0.0 ? static_cast<std::uint16_t>(std::lround(255.0 * (first[i] - lo) / range)) : 0;
  }
  return s;
}

}  // namespace stackfit::io
