#include "stackfit/error.hpp"

namespace stackfit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotAnEllipse: return "NotAnEllipse";
    case ErrorCode::GaugeFailure: return "GaugeFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegeneratePoints: return "DegeneratePoints";
    case ErrorCode::EmptyLayer: return "EmptyLayer";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InternalError: return "InternalError";
    case ErrorCode::ImaginaryCircle: return "ImaginaryCircle";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::MissingSlice: return "MissingSlice";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace stackfit
