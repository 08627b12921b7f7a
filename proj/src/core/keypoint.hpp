#pragma once

#include <optional>
#include <string_view>

namespace fkp {

enum class Detector { sfa, surf, sift };

std::string_view to_string(Detector d) noexcept;
std::optional<Detector> parse_detector(std::string_view name) noexcept;

struct KeyPoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 1.0;
  double score = 0.0;
  std::optional<double> orientation;  // radians
  Detector detector = Detector::sfa;

  friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

}  // namespace fkp
