#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace stackfit {

using Dims3 = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

/// Dense 3D intensity grid, x fastest. spacing is physical size per voxel.
struct Volume {
  Dims3 dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};
  std::vector<double> data;

  Volume() = default;
  Volume(Dims3 d, Vec3 s = {1.0, 1.0, 1.0}, double fill = 0.0)
      : dims(d), spacing(s), data(d[0] * d[1] * d[2], fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }
  double& at(std::size_t x, std::size_t y, std::size_t z) { return data[index(x, y, z)]; }
  double at(std::size_t x, std::size_t y, std::size_t z) const { return data[index(x, y, z)]; }

  /// Throws Error(InvalidInput) if data length or spacing are inconsistent.
  void validate() const;
};

/// Binary mask over a volume grid (one byte per voxel).
struct Mask {
  Dims3 dims{0, 0, 0};
  std::vector<std::uint8_t> data;

  Mask() = default;
  explicit Mask(Dims3 d) : dims(d), data(d[0] * d[1] * d[2], 0) {}
  std::size_t count() const;
};

/// Integer label per voxel; 0 is background.
struct LabelVolume {
  Dims3 dims{0, 0, 0};
  std::vector<std::uint32_t> data;
};

}  // namespace stackfit
