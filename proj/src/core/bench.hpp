#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core/fitness.hpp"
#include "core/grid.hpp"
#include "core/image.hpp"
#include "core/keypoint.hpp"

namespace fkp::bench {

enum class FixtureKind { disc, checkerboard, blob_grid, step_edge, constant };

std::string_view to_string(FixtureKind kind) noexcept;
std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept;

/// Synthetic test image. Negative centre/edge coordinates mean "image centre".
struct FixtureSpec {
  FixtureKind kind = FixtureKind::disc;
  int width = 256;
  int height = 256;
  std::uint8_t foreground = 255;
  std::uint8_t background = 0;
  double center_x = -1.0;  // disc
  double center_y = -1.0;
  double radius = 40.0;
  int square = 16;         // checkerboard cell size
  int rows = 3;            // blob grid
  int cols = 3;
  double sigma = 2.0;
  int edge_x = -1;         // step edge: columns >= edge_x are foreground
  Band band = Band::bright();
};

struct Fixture {
  Image image;                                    // gray
  Grid<std::uint8_t> mask;                        // 1 where luminance lies in spec.band
  std::vector<std::pair<double, double>> centers;  // disc / blob centres
};

Fixture make_fixture(const FixtureSpec& spec);

/// RGB copy with each keypoint drawn as a red 3x3 cross, clipped at the borders.
Image annotate(const Image& img, std::span<const KeyPoint> keypoints);

struct DetectionReport {
  std::string detector;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::size_t keypoint_count = 0;
  double elapsed_ms = 0.0;
  double precision = 0.0;  // keypoints on the mask / keypoints
  double recall = 0.0;     // mask components hit / mask components
  double spread = 0.0;     // mean nearest-neighbour distance between keypoints
  std::size_t mask_components = 0;

  friend bool operator==(const DetectionReport&, const DetectionReport&) = default;
};

/// 4-connected component labels (0 = background, 1..n); returns n.
std::size_t label_components(const Grid<std::uint8_t>& mask, Grid<std::int32_t>& labels);

DetectionReport compute_report(const Grid<std::uint8_t>& mask, std::span<const KeyPoint> keypoints,
                               double elapsed_ms, Detector detector,
                               nlohmann::ordered_json parameters = nlohmann::ordered_json::object());

std::string to_json(const DetectionReport& report);
DetectionReport report_from_json(std::string_view text);

/// Header "x,y,scale,score,detector", LF line endings.
std::string keypoints_csv(std::span<const KeyPoint> keypoints);
std::vector<KeyPoint> parse_keypoints_csv(std::string_view text);

/// Nearest pixel to a keypoint, clamped into the image rectangle.
std::pair<int, int> keypoint_pixel(const KeyPoint& kp, int width, int height) noexcept;

}  // namespace fkp::bench
