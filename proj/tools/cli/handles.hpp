#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "fkp/fkp.h"

namespace fkp::cli {

struct ImageDeleter {
  void operator()(fkp_image* p) const noexcept { fkp_image_destroy(p); }
};
struct KeypointsDeleter {
  void operator()(fkp_keypoints* p) const noexcept { fkp_keypoints_destroy(p); }
};
struct ReportDeleter {
  void operator()(fkp_report* p) const noexcept { fkp_report_destroy(p); }
};
struct BufferDeleter {
  void operator()(void* p) const noexcept { fkp_free(p); }
};

using ImagePtr = std::unique_ptr<fkp_image, ImageDeleter>;
using KeypointsPtr = std::unique_ptr<fkp_keypoints, KeypointsDeleter>;
using ReportPtr = std::unique_ptr<fkp_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, BufferDeleter>;

/// A failed library call; carries the status so callers can pick an exit code.
class ApiError : public std::runtime_error {
 public:
  ApiError(fkp_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  fkp_status status() const noexcept { return status_; }

 private:
  fkp_status status_;
};

inline void check(fkp_status status, const char* what) {
  if (status != FKP_OK) {
    throw ApiError(status, std::string(what) + ": " + fkp_status_name(status) + ": " +
                               fkp_last_error());
  }
}

}  // namespace fkp::cli
