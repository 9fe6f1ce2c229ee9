#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "stackfit/error.hpp"
#include "stackfit/imageio.hpp"
#include "temp_dir.hpp"

using namespace stackfit;
using namespace stackfit::io;
using doctest::Approx;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorCode decode_error(const std::string& s) {
  try {
    decode_pgm(bytes_of(s));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode succeeded");
  return ErrorCode::InternalError;
}

Volume test_volume(int bit_depth) {
  Volume v({5, 4, 3}, {0.5, 0.5, 2.0});
  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  for (std::size_t i = 0; i < v.size(); ++i) v.data[i] = std::fmod(37.0 * static_cast<double>(i * i), maxval + 1);
  v.data[3] = maxval;
  return v;
}

StackFitResult circle_result() {
  StackFitResult r;
  LayerFit lf;
  lf.layer_index = 4;
  lf.conic = ConicParams{{0.5, 0, 0.5, 0, 0, -0.5}};
  lf.fitting_conic = lf.conic;
  lf.is_ellipse = true;
  lf.ellipse = GeometricEllipse{{0, 0}, {1, 1}, 0};
  lf.loss = 0.0;
  r.layers.push_back(lf);
  LayerFit hyp;
  hyp.layer_index = 5;
  hyp.conic = ConicParams{{1.25, 0.1, -0.25, 0.3, -0.7, 1.0 / 3.0}};
  hyp.fitting_conic = hyp.conic;
  hyp.loss = 0.125;
  r.layers.push_back(hyp);
  return r;
}

}  // namespace

TEST_CASE("PGM 8-bit example") {
  Slice2D s{2, 2, 255, {0, 255, 128, 64}};
  const auto enc = encode_pgm(s);
  CHECK(enc.size() == 15);
  CHECK(std::string(enc.begin(), enc.begin() + 11) == "P5\n2 2\n255\n");
  CHECK(enc[11] == 0);
  CHECK(enc[12] == 255);
  CHECK(enc[13] == 128);
  CHECK(enc[14] == 64);
  const auto dec = decode_pgm(enc);
  CHECK(dec.width == 2);
  CHECK(dec.height == 2);
  CHECK(dec.maxval == 255);
  CHECK(dec.samples == s.samples);
}

TEST_CASE("PGM 16-bit samples are big-endian") {
  Slice2D s{3, 1, 65535, {0x0102, 0xFFFF, 7}};
  const auto enc = encode_pgm(s);
  const std::string header = "P5\n3 1\n65535\n";
  REQUIRE(enc.size() == header.size() + 6);
  CHECK(enc[header.size()] == 0x01);
  CHECK(enc[header.size() + 1] == 0x02);
  CHECK(enc[header.size() + 4] == 0x00);
  CHECK(enc[header.size() + 5] == 0x07);
  CHECK(decode_pgm(enc).samples == s.samples);
}

TEST_CASE("PGM header parsing") {
  const auto s = decode_pgm(bytes_of(std::string("P5 # comment\n 2\t1 # another\n255\n") + "\x05\x06"));
  CHECK(s.width == 2);
  CHECK(s.samples == std::vector<std::uint16_t>{5, 6});
  CHECK(decode_error("P2\n2 2\n255\n0 1 2 3\n") == ErrorCode::UnsupportedFormat);
  CHECK(decode_error("GIF89a") == ErrorCode::UnsupportedFormat);
  CHECK(decode_error("P5\n2 x\n255\n....") == ErrorCode::MalformedHeader);
  CHECK(decode_error("P5\n2 2\n1000\n") == ErrorCode::UnsupportedMaxval);
  CHECK(decode_error("P5\n2 2\n255\n\x01\x02") == ErrorCode::TruncatedData);
  CHECK(decode_error("P5\n2 2\n65535\n\x01\x02\x03\x04\x05\x06\x07") == ErrorCode::TruncatedData);
}

TEST_CASE("PGM file round trip") {
  TempDir dir("pgm");
  for (std::uint32_t maxval : {255u, 65535u}) {
    Slice2D s{7, 5, maxval, {}};
    for (std::size_t i = 0; i < 35; ++i) s.samples.push_back(static_cast<std::uint16_t>((i * 2654435761u) % (maxval + 1)));
    const auto p = dir / ("s" + std::to_string(maxval) + ".pgm");
    write_pgm(p, s);
    const auto back = read_pgm(p);
    CHECK(back.samples == s.samples);
    CHECK(back.maxval == maxval);
  }
  CHECK_THROWS_AS(read_pgm(dir / "absent.pgm"), Error);
}

TEST_CASE("slice filenames") {
  CHECK(slice_filename("slice_%03d.pgm", 7) == "slice_007.pgm");
  CHECK(slice_filename("z%d.pgm", 12) == "z12.pgm");
  CHECK_THROWS_AS(slice_filename("slice.pgm", 1), Error);
  CHECK_THROWS_AS(slice_filename("%d_%d.pgm", 1), Error);
  CHECK_THROWS_AS(slice_filename("%s.pgm", 1), Error);
}

TEST_CASE("volume directory round trip") {
  for (int depth : {8, 16}) {
    TempDir dir("vol");
    const Volume v = test_volume(depth);
    VolumeMeta meta;
    meta.bit_depth = depth;
    meta.pattern = "slice_%03d.pgm";
    write_volume_dir(dir.path(), v, meta);
    CHECK(fs::exists(dir / "slice_000.pgm"));
    CHECK(fs::exists(dir / "slice_002.pgm"));
    const auto m = read_volume_meta(dir / "volume.meta");
    CHECK(m.dims == v.dims);
    CHECK(m.spacing == v.spacing);
    CHECK(m.bit_depth == depth);
    CHECK(m.pattern == meta.pattern);
    const Volume back = read_volume_dir(dir.path(), m);
    CHECK(back.dims == Dims3{5, 4, 3});
    CHECK(back.data == v.data);
    CHECK(back.spacing == v.spacing);
  }
}

TEST_CASE("volume directory errors") {
  TempDir dir("volerr");
  VolumeMeta meta;
  meta.bit_depth = 8;
  write_volume_dir(dir.path(), test_volume(8), meta);
  const auto m = read_volume_meta(dir / "volume.meta");
  SUBCASE("missing slice names the path") {
    fs::remove(dir / slice_filename(m.pattern, 1));
    try {
      read_volume_dir(dir.path(), m);
      FAIL("expected MissingSlice");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingSlice);
      CHECK(std::string(e.what()).find(slice_filename(m.pattern, 1)) != std::string::npos);
    }
  }
  SUBCASE("wrong slice size") {
    write_pgm(dir / slice_filename(m.pattern, 2), Slice2D{3, 3, 255, std::vector<std::uint16_t>(9, 0)});
    try {
      read_volume_dir(dir.path(), m);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }
  SUBCASE("malformed meta") {
    write_file_atomic(dir / "bad.meta", "dims: 4 4\n");
    CHECK_THROWS_AS(read_volume_meta(dir / "bad.meta"), Error);
    write_file_atomic(dir / "bad.meta", "dims: 4 4 4\nbit_depth: 12\n");
    CHECK_THROWS_AS(read_volume_meta(dir / "bad.meta"), Error);
  }
}

TEST_CASE("written intensities are rounded and clamped") {
  TempDir dir("clamp");
  Volume v({3, 1, 1});
  v.data = {-4.0, 12.6, 300.0};
  VolumeMeta meta;
  meta.bit_depth = 8;
  write_volume_dir(dir.path(), v, meta);
  const Volume back = read_volume_dir(dir.path(), read_volume_meta(dir / "volume.meta"));
  CHECK(back.data == std::vector<double>{0.0, 13.0, 255.0});
}

TEST_CASE("label directory") {
  TempDir dir("labels");
  LabelVolume l;
  l.dims = {3, 3, 3};
  l.data.assign(27, 0);
  l.data[13] = 2;
  l.data[0] = 1;
  write_label_dir(dir.path(), l, {1, 1, 1});
  const Volume back = read_volume_dir(dir.path(), read_volume_meta(dir / "volume.meta"));
  CHECK(back.data[13] == 2.0);
  CHECK(back.data[0] == 1.0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("fits CSV") {
  const std::vector<ObjectFit> fits{{"cell", circle_result()}};
  const std::string text = format_fits_csv(fits);
  std::istringstream in(text);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "object,layer,a,b,c,d,e,f,cx,cy,rx,ry,angle,loss,is_ellipse");
  CHECK(row1 == "cell,4,0.5,0,0.5,0,0,-0.5,0,0,1,1,0,0,1");
  CHECK(row2 == "cell,5,1.25,0.1,-0.25,0.3,-0.7,0.333333333333,,,,,,0.125,0");
  CHECK(text.find('\r') == std::string::npos);

  const auto rows = parse_fits_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].object == "cell");
  CHECK(rows[0].theta[0] == 0.5);
  CHECK(rows[0].has_geometry);
  CHECK(rows[0].ellipse.semi_axes[0] == 1.0);
  CHECK_FALSE(rows[1].has_geometry);
  CHECK_FALSE(rows[1].is_ellipse);
  CHECK(rows[1].loss == 0.125);

  TempDir dir("fits");
  write_fits_csv(dir / "fits.csv", fits);
  CHECK(slurp(dir / "fits.csv") == text);
  const auto again = read_fits_csv(dir / "fits.csv");
  CHECK(again.size() == 2);
  CHECK(again[1].theta == rows[1].theta);

  CHECK_THROWS_AS(parse_fits_csv("object,layer\ncell,1\n"), Error);
  const std::vector<ObjectFit> bad{{"a,b", circle_result()}};
  CHECK_THROWS_AS(format_fits_csv(bad), Error);
}

TEST_CASE("points CSV round trip") {
  std::vector<LayerPointSet> layers{{3, {{1.5, -2.25}, {0.1, 7.0}}}, {-1, {{4.0, 4.0}}}};
  const std::string text = format_points_csv(layers);
  CHECK(text.rfind("layer,x,y\n", 0) == 0);
  const auto back = parse_points_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].layer_index == -1);  // grouped and sorted by layer
  CHECK(back[1].points == layers[0].points);
  CHECK(format_points_csv(back) == format_points_csv(parse_points_csv(format_points_csv(back))));
  CHECK_THROWS_AS(parse_points_csv("layer,x,y\n1,2\n"), Error);
  CHECK_THROWS_AS(parse_points_csv("layer,x,y\n1,2,abc\n"), Error);
  CHECK(parse_points_csv("layer,x,y\n").empty());
}

TEST_CASE("regions and bench CSV") {
  SeedRegion r;
  r.label = 1;
  r.bbox.lo = {1, 2, 3};
  r.bbox.hi = {4, 5, 6};
  r.centroid = {2.5, 3.5, 4.5};
  r.voxel_count = 17;
  const std::vector<SeedRegion> regions{r};
  CHECK(format_regions_csv(regions) == "label,x0,x1,y0,y1,z0,z1,cx,cy,cz,voxels\n1,1,4,2,5,3,6,2.5,3.5,4.5,17\n");

  BenchRecord ok;
  ok.noise_count = 10;
  ok.err_squared = 0.25;
  ok.err_robust = 0.125;
  BenchRecord failed;
  failed.noise_count = 20;
  failed.err_squared = std::nan("");
  failed.squared_error_message = "DegeneratePoints: x";
  failed.err_robust = 0.5;
  const std::vector<BenchRecord> recs{ok, failed};
  CHECK(format_bench_csv(recs) == "noise_count,err_squared,err_robust\n10,0.25,0.125\n20,error,0.5\n");
}

TEST_CASE("overlay SVG") {
  Slice2D blank{16, 12, 255, std::vector<std::uint16_t>(16 * 12, 0)};
  const std::vector<GeometricEllipse> fits{{{8, 6}, {1, 1}, 0}};
  const std::string svg = render_overlay_svg(blank, fits);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t count = 0;
  for (std::size_t pos = svg.find("<ellipse"); pos != std::string::npos; pos = svg.find("<ellipse", pos + 1)) ++count;
  CHECK(count == 1);
  CHECK(svg.find("rx=\"1\" ry=\"1\"") != std::string::npos);
  CHECK(svg.find("data:image/bmp;base64,") != std::string::npos);
  CHECK(render_overlay_svg(blank, fits) == svg);

  TempDir dir("svg");
  render_overlay_svg(blank, fits, dir / "o.svg");
  CHECK(slurp(dir / "o.svg") == svg);
}

TEST_CASE("bench SVG") {
  const std::string empty = render_bench_svg(std::vector<BenchRecord>{});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);
  CHECK(empty.find("<polyline") == std::string::npos);

  std::vector<BenchRecord> recs;
  for (std::size_t c = 0; c <= 50; c += 10) {
    BenchRecord r;
    r.noise_count = c;
    r.err_squared = 0.01 * c;
    r.err_robust = c == 30 ? std::numeric_limits<double>::infinity() : 0.005 * c;
    recs.push_back(r);
  }
  const std::string svg = render_bench_svg(recs);
  CHECK(svg.find("squared") != std::string::npos);
  CHECK(svg.find("robust") != std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(render_bench_svg(recs) == svg);
}

TEST_CASE("slice extraction scales to 8 bits") {
  Volume v({2, 2, 2});
  v.data = {10, 20, 30, 50, 1, 1, 1, 1};
  const auto s = volume_slice_8bit(v, 0);
  CHECK(s.maxval == 255);
  CHECK(s.samples == std::vector<std::uint16_t>{0, 64, 128, 255});
  CHECK(volume_slice_8bit(v, 1).samples == std::vector<std::uint16_t>{0, 0, 0, 0});
}

TEST_CASE("atomic writes leave no temporary files") {
  TempDir dir("atomic");
  write_file_atomic(dir / "a.txt", "one");
  write_file_atomic(dir / "a.txt", "two");
  CHECK(slurp(dir / "a.txt") == "two");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++n;
  CHECK(n == 1);
}
