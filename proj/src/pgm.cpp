#include <cctype>
#include <fstream>
#include <iterator>

#include "stackfit/error.hpp"
#include "stackfit/imageio.hpp"

namespace stackfit::io {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> b) : bytes_(b) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::uint64_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, std::string("expected ") + what);
    }
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFULL) throw Error(ErrorCode::MalformedHeader, std::string(what) + " too large");
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Slice2D decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a PNM file");
  if (bytes[1] != '5') {
    throw Error(ErrorCode::UnsupportedFormat,
                std::string("only binary PGM (P5) is supported, got P") + static_cast<char>(bytes[1]));
  }
  HeaderReader r(bytes.subspan(2));
  Slice2D s;
  s.width = r.number("width");
  s.height = r.number("height");
  const auto maxval = r.number("maxval");
  if (maxval != 255 && maxval != 65535) {
    throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " (need 255 or 65535)");
  }
  s.maxval = static_cast<std::uint32_t>(maxval);
  std::size_t pos = 2 + r.pos();
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::MalformedHeader, "missing whitespace after maxval");
  }
  ++pos;
  const std::size_t bps = s.maxval > 255 ? 2 : 1;
  const std::size_t n = s.width * s.height;
  if (bytes.size() - pos < n * bps) {
    throw Error(ErrorCode::TruncatedData, "expected " + std::to_string(n * bps) + " sample bytes, found " +
                                              std::to_string(bytes.size() - pos));
  }
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (bps == 1) {
      s.samples[i] = bytes[pos + i];
    } else {
      s.samples[i] = static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]);
    }
  }
  return s;
}

std::vector<std::uint8_t> encode_pgm(const Slice2D& s) {
  if (s.maxval != 255 && s.maxval != 65535) {
    throw Error(ErrorCode::UnsupportedMaxval, "maxval must be 255 or 65535");
  }
  if (s.samples.size() != s.width * s.height) {
    throw Error(ErrorCode::DimensionMismatch, "sample count does not match width*height");
  }
  const std::string header =
      "P5\n" + std::to_string(s.width) + " " + std::to_string(s.height) + "\n" + std::to_string(s.maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + s.samples.size() * 2);
  for (auto v : s.samples) {
    if (v > s.maxval) throw Error(ErrorCode::InvalidInput, "sample exceeds maxval");
    if (s.maxval > 255) {
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    } else {
      out.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return out;
}

Slice2D read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

void write_pgm(const fs::path& path, const Slice2D& slice) {
  const auto bytes = encode_pgm(slice);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace stackfit::io
