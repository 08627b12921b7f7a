#include "core/keypoint.hpp"

namespace fkp {

std::string_view to_string(Detector d) noexcept {
  switch (d) {
    case Detector::sfa: return "SFA";
    case Detector::surf: return "SURF";
    case Detector::sift: return "SIFT";
  }
  return "?";
}

std::optional<Detector> parse_detector(std::string_view name) noexcept {
  if (name == "sfa" || name == "SFA") return Detector::sfa;
  if (name == "surf" || name == "SURF") return Detector::surf;
  if (name == "sift" || name == "SIFT") return Detector::sift;
  return std::nullopt;
}

}  // namespace fkp
