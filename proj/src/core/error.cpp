#include "core/error.hpp"

namespace fkp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::malformed_header: return "malformed-header";
    case ErrorCode::truncated_payload: return "truncated-payload";
    case ErrorCode::unsupported_maxval: return "unsupported-maxval";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::image_too_small: return "image-too-small";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::geometry_out_of_bounds: return "geometry-out-of-bounds";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace fkp
