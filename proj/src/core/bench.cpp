#include "core/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fkp::bench {

std::string_view to_string(FixtureKind kind) noexcept {
  switch (kind) {
    case FixtureKind::disc: return "disc";
    case FixtureKind::checkerboard: return "checkerboard";
    case FixtureKind::blob_grid: return "blob-grid";
    case FixtureKind::step_edge: return "step-edge";
    case FixtureKind::constant: return "constant";
  }
  return "?";
}

std::optional<FixtureKind> parse_fixture_kind(std::string_view name) noexcept {
  for (auto kind : {FixtureKind::disc, FixtureKind::checkerboard, FixtureKind::blob_grid,
                    FixtureKind::step_edge, FixtureKind::constant}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void out_of_bounds(const std::string& what) {
  throw Error(ErrorCode::geometry_out_of_bounds, what);
}

}  // namespace

Fixture make_fixture(const FixtureSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw Error(ErrorCode::invalid_argument, "fixture dimensions must be positive");
  }
  spec.band.validate();
  Fixture fx{Image(spec.width, spec.height, 1), Grid<std::uint8_t>(spec.width, spec.height), {}};
  Image& img = fx.image;
  const double fg = spec.foreground;
  const double bg = spec.background;

  switch (spec.kind) {
    case FixtureKind::disc: {
      const double cx = spec.center_x < 0 ? spec.width / 2 : spec.center_x;
      const double cy = spec.center_y < 0 ? spec.height / 2 : spec.center_y;
      const double r = spec.radius;
      if (!(r > 0.0) || cx - r < 0 || cy - r < 0 || cx + r > spec.width - 1 ||
          cy + r > spec.height - 1) {
        out_of_bounds("disc does not fit inside the image");
      }
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const double dx = x - cx;
          const double dy = y - cy;
          img(x, y) = static_cast<std::uint8_t>(dx * dx + dy * dy <= r * r ? fg : bg);
        }
      }
      fx.centers.emplace_back(cx, cy);
      break;
    }
    case FixtureKind::checkerboard: {
      if (spec.square <= 0 || spec.square > std::min(spec.width, spec.height)) {
        out_of_bounds("checkerboard square must lie in [1, min(width, height)]");
      }
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const bool on = ((x / spec.square) + (y / spec.square)) % 2 == 1;
          img(x, y) = static_cast<std::uint8_t>(on ? fg : bg);
        }
      }
      break;
    }
    case FixtureKind::blob_grid: {
      if (spec.rows <= 0 || spec.cols <= 0 || !(spec.sigma > 0.0)) {
        out_of_bounds("blob grid needs positive rows, cols and sigma");
      }
      for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
          const double cx = std::round((c + 1.0) * spec.width / (spec.cols + 1.0));
          const double cy = std::round((r + 1.0) * spec.height / (spec.rows + 1.0));
          const double margin = 3.0 * spec.sigma;
          if (cx - margin < 0 || cy - margin < 0 || cx + margin > spec.width - 1 ||
              cy + margin > spec.height - 1) {
            out_of_bounds("blob support leaves the image");
          }
          fx.centers.emplace_back(cx, cy);
        }
      }
      const double two_var = 2.0 * spec.sigma * spec.sigma;
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          double peak = 0.0;
          for (const auto& [cx, cy] : fx.centers) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            peak = std::max(peak, std::exp(-d2 / two_var));
          }
          img(x, y) = static_cast<std::uint8_t>(std::lround(bg + (fg - bg) * peak));
        }
      }
      break;
    }
    case FixtureKind::step_edge: {
      const int edge = spec.edge_x < 0 ? spec.width / 2 : spec.edge_x;
      if (edge <= 0 || edge >= spec.width) {
        out_of_bounds("step edge column must lie strictly inside the image");
      }
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          img(x, y) = static_cast<std::uint8_t>(x >= edge ? fg : bg);
        }
      }
      break;
    }
    case FixtureKind::constant:
      std::fill(img.data().begin(), img.data().end(), spec.background);
      break;
  }
  fx.mask = band_mask(img, spec.band);
  return fx;
}

std::pair<int, int> keypoint_pixel(const KeyPoint& kp, int width, int height) noexcept {
  const auto x = std::clamp(std::lround(kp.x), 0L, static_cast<long>(width - 1));
  const auto y = std::clamp(std::lround(kp.y), 0L, static_cast<long>(height - 1));
  return {static_cast<int>(x), static_cast<int>(y)};
}

Image annotate(const Image& img, std::span<const KeyPoint> keypoints) {
  Image out = to_rgb(img);
  constexpr int cross[5][2] = {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (const auto& kp : keypoints) {
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) continue;
    const long cx = std::lround(kp.x);
    const long cy = std::lround(kp.y);
    for (const auto& d : cross) {
      const long x = cx + d[0];
      const long y = cy + d[1];
      if (x < 0 || y < 0 || x >= out.width() || y >= out.height()) continue;
      out(static_cast<int>(x), static_cast<int>(y), 0) = 255;
      out(static_cast<int>(x), static_cast<int>(y), 1) = 0;
      out(static_cast<int>(x), static_cast<int>(y), 2) = 0;
    }
  }
  return out;
}

std::size_t label_components(const Grid<std::uint8_t>& mask, Grid<std::int32_t>& labels) {
  labels = Grid<std::int32_t>(mask.width(), mask.height());
  std::int32_t next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || labels(x, y) != 0) continue;
      ++next;
      labels(x, y) = next;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        constexpr int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : nb) {
          const int qx = px + d[0];
          const int qy = py + d[1];
          if (mask.contains(qx, qy) && mask(qx, qy) && labels(qx, qy) == 0) {
            labels(qx, qy) = next;
            stack.emplace_back(qx, qy);
          }
        }
      }
    }
  }
  return static_cast<std::size_t>(next);
}

DetectionReport compute_report(const Grid<std::uint8_t>& mask, std::span<const KeyPoint> keypoints,
                               double elapsed_ms, Detector detector,
                               nlohmann::ordered_json parameters) {
  if (!(elapsed_ms > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "elapsed time must be positive");
  }
  DetectionReport report;
  report.detector = std::string(to_string(detector));
  report.parameters = std::move(parameters);
  report.keypoint_count = keypoints.size();
  report.elapsed_ms = elapsed_ms;

  Grid<std::int32_t> labels;
  const std::size_t components = label_components(mask, labels);
  report.mask_components = components;

  std::size_t on_mask = 0;
  std::vector<bool> hit(components + 1, false);
  for (const auto& kp : keypoints) {
    const auto [x, y] = keypoint_pixel(kp, mask.width(), mask.height());
    if (mask(x, y)) {
      ++on_mask;
      hit[static_cast<std::size_t>(labels(x, y))] = true;
    }
  }
  if (keypoints.empty()) {
    report.precision = components == 0 ? 1.0 : 0.0;
  } else {
    report.precision = static_cast<double>(on_mask) / static_cast<double>(keypoints.size());
  }
  if (components == 0) {
    report.recall = 1.0;
  } else {
    const auto found = std::count(hit.begin() + 1, hit.end(), true);
    report.recall = static_cast<double>(found) / static_cast<double>(components);
  }

  if (keypoints.size() >= 2) {
    double total = 0.0;
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < keypoints.size(); ++j) {
        if (i == j) continue;
        nearest = std::min(nearest, std::hypot(keypoints[i].x - keypoints[j].x,
                                               keypoints[i].y - keypoints[j].y));
      }
      total += nearest;
    }
    report.spread = total / static_cast<double>(keypoints.size());
  }
  return report;
}

std::string to_json(const DetectionReport& report) {
  nlohmann::ordered_json j;
  j["detector"] = report.detector;
  j["parameters"] = report.parameters;
  j["keypoint_count"] = report.keypoint_count;
  j["elapsed_ms"] = report.elapsed_ms;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["spread"] = report.spread;
  j["mask_components"] = report.mask_components;
  return j.dump(2) + "\n";
}

DetectionReport report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    DetectionReport r;
    r.detector = j.at("detector").get<std::string>();
    r.parameters = j.at("parameters");
    r.keypoint_count = j.at("keypoint_count").get<std::size_t>();
    r.elapsed_ms = j.at("elapsed_ms").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.spread = j.at("spread").get<double>();
    r.mask_components = j.at("mask_components").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("report JSON: ") + e.what());
  }
}

std::string keypoints_csv(std::span<const KeyPoint> keypoints) {
  std::string out = "x,y,scale,score,detector\n";
  char line[160];
  for (const auto& kp : keypoints) {
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%s\n", kp.x, kp.y, kp.scale,
                  kp.score, std::string(to_string(kp.detector)).c_str());
    out += line;
  }
  return out;
}

std::vector<KeyPoint> parse_keypoints_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "x,y,scale,score,detector") {
    throw Error(ErrorCode::parse, "keypoint CSV: missing header");
  }
  std::vector<KeyPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[5];
    for (auto& c : cell) std::getline(row, c, ',');
    try {
      KeyPoint kp;
      kp.x = std::stod(cell[0]);
      kp.y = std::stod(cell[1]);
      kp.scale = std::stod(cell[2]);
      kp.score = std::stod(cell[3]);
      const auto det = parse_detector(cell[4]);
      if (!det) throw Error(ErrorCode::parse, "keypoint CSV: unknown detector " + cell[4]);
      kp.detector = *det;
      out.push_back(kp);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::parse, "keypoint CSV: bad number in line '" + line + "'");
    }
  }
  return out;
}

}  // namespace fkp::bench
