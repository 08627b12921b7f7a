#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fkp {

enum class ErrorCode {
  invalid_argument = 1,
  malformed_header,
  truncated_payload,
  unsupported_maxval,
  unsupported_format,
  image_too_small,
  out_of_range,
  overflow,
  geometry_out_of_bounds,
  io,
  parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. Codec errors carry the byte offset where decoding failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace fkp
