#include "stackfit/volume.hpp"

#include <cmath>
#include <algorithm>

#include "stackfit/error.hpp"

namespace stackfit {

void Volume::validate() const {
  if (data.size() != dims[0] * dims[1] * dims[2]) {
    throw Error(ErrorCode::InvalidInput, "volume data length does not match dims");
  }
  for (double s : spacing) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidInput, "spacing must be positive");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

}  // namespace stackfit
