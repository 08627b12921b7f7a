#include "core/surf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fkp::surf {

namespace {

bool valid_filter_size(int size) noexcept { return size >= 3 && size % 3 == 0 && size % 2 == 1; }

void validate_sizes(std::span<const int> sizes) {
  if (sizes.empty()) {
    throw Error(ErrorCode::invalid_argument, "at least one filter size is required");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!valid_filter_size(sizes[i])) {
      throw Error(ErrorCode::invalid_argument,
                  "filter size " + std::to_string(sizes[i]) + " is not an odd multiple of 3");
    }
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw Error(ErrorCode::invalid_argument, "filter sizes must be strictly increasing");
    }
  }
}

}  // namespace

bool filter_fits(int width, int height, int x, int y, int filter_size) noexcept {
  const int b = (filter_size - 1) / 2;
  return x - b >= 0 && y - b >= 0 && x + b < width && y + b < height;
}

BoxHessian box_hessian(const IntegralImage& ii, int x, int y, int filter_size) {
  if (!valid_filter_size(filter_size)) {
    throw Error(ErrorCode::invalid_argument, "filter size must be an odd multiple of 3");
  }
  if (!filter_fits(ii.width(), ii.height(), x, y, filter_size)) {
    throw Error(ErrorCode::out_of_range, "filter does not fit at this position");
  }
  const int lobe = filter_size / 3;
  const int half = (filter_size - 1) / 2;
  const int band = 2 * lobe - 1;

  const std::int64_t xx = ii.box(x - half, y - lobe + 1, filter_size, band) -
                          3 * ii.box(x - lobe / 2, y - lobe + 1, lobe, band);
  const std::int64_t yy = ii.box(x - lobe + 1, y - half, band, filter_size) -
                          3 * ii.box(x - lobe + 1, y - lobe / 2, band, lobe);
  const std::int64_t xy = ii.box(x - lobe, y - lobe, lobe, lobe) +
                          ii.box(x + 1, y + 1, lobe, lobe) -
                          ii.box(x + 1, y - lobe, lobe, lobe) -
                          ii.box(x - lobe, y + 1, lobe, lobe);

  const double area = static_cast<double>(filter_size) * filter_size;
  return {static_cast<double>(xx) / area, static_cast<double>(yy) / area,
          static_cast<double>(xy) / area};
}

double hessian_det(double dxx, double dyy, double dxy, double weight) noexcept {
  const double w = weight * dxy;
  return dxx * dyy - w * w;
}

std::vector<ResponseLayer> build_layers(const IntegralImage& ii, std::span<const int> sizes,
                                        double weight) {
  validate_sizes(sizes);
  std::vector<ResponseLayer> layers;
  layers.reserve(sizes.size());
  for (const int size : sizes) {
    ResponseLayer layer{size, Grid<double>(ii.width(), ii.height()),
                        Grid<std::uint8_t>(ii.width(), ii.height())};
    const int b = (size - 1) / 2;
    for (int y = b; y < ii.height() - b; ++y) {
      for (int x = b; x < ii.width() - b; ++x) {
        const auto h = box_hessian(ii, x, y, size);
        layer.responses(x, y) = hessian_det(h.dxx, h.dyy, h.dxy, weight);
        layer.laplacian_sign(x, y) = (h.dxx + h.dyy) >= 0.0 ? 1 : 0;
      }
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::vector<KeyPoint> nms_3x3x3(const std::vector<ResponseLayer>& layers, double threshold) {
  if (layers.size() < 3) {
    throw Error(ErrorCode::invalid_argument, "non-maximum suppression needs >= 3 layers");
  }
  const int width = layers.front().responses.width();
  const int height = layers.front().responses.height();
  std::vector<KeyPoint> out;
  for (std::size_t m = 1; m + 1 < layers.size(); ++m) {
    const auto& below = layers[m - 1].responses;
    const auto& mid = layers[m].responses;
    const auto& above = layers[m + 1].responses;
    for (int y = 1; y < height - 1; ++y) {
      for (int x = 1; x < width - 1; ++x) {
        const double v = mid(x, y);
        if (!(v > threshold)) continue;
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy) {
          for (int dx = -1; dx <= 1 && is_max; ++dx) {
            if (below(x + dx, y + dy) >= v || above(x + dx, y + dy) >= v ||
                ((dx != 0 || dy != 0) && mid(x + dx, y + dy) >= v)) {
              is_max = false;
            }
          }
        }
        if (!is_max) continue;

        const double lo = below(x, y);
        const double hi = above(x, y);
        const double curvature = hi - 2.0 * v + lo;
        double offset = curvature < 0.0 ? -(hi - lo) / (2.0 * curvature) : 0.0;
        offset = std::clamp(offset, -0.5, 0.5);
        const double s0 = layers[m].filter_size;
        const double size = offset >= 0.0 ? s0 + offset * (layers[m + 1].filter_size - s0)
                                           : s0 + offset * (s0 - layers[m - 1].filter_size);
        KeyPoint kp;
        kp.x = x;
        kp.y = y;
        kp.scale = filter_sigma(size);
        kp.score = v;
        kp.detector = Detector::surf;
        out.push_back(kp);
      }
    }
  }
  return out;
}

namespace {

struct Haar {
  double dx = 0.0;
  double dy = 0.0;
  bool valid = false;
};

// Odd-width wavelet centred on the pixel; the centre row/column is excluded,
// which keeps responses exactly antisymmetric under mirroring.
Haar haar(const IntegralImage& ii, int px, int py, int radius) {
  Haar h;
  if (px - radius < 0 || py - radius < 0 || px + radius >= ii.width() ||
      py + radius >= ii.height()) {
    return h;
  }
  const int span = 2 * radius + 1;
  h.dx = static_cast<double>(ii.box(px + 1, py - radius, radius, span) -
                             ii.box(px - radius, py - radius, radius, span));
  h.dy = static_cast<double>(ii.box(px - radius, py + 1, span, radius) -
                             ii.box(px - radius, py - radius, span, radius));
  h.valid = true;
  return h;
}

int round_to_int(double v) noexcept { return static_cast<int>(std::lround(v)); }

}  // namespace

double dominant_orientation(const IntegralImage& ii, const KeyPoint& kp) {
  const double s = kp.scale;
  const int cx = round_to_int(kp.x);
  const int cy = round_to_int(kp.y);
  const int radius = std::max(1, round_to_int(2.0 * s));

  struct Sample {
    double angle, dx, dy;
  };
  std::vector<Sample> samples;
  for (int j = -6; j <= 6; ++j) {
    for (int i = -6; i <= 6; ++i) {
      if (i * i + j * j >= 36) continue;
      const Haar h = haar(ii, cx + round_to_int(i * s), cy + round_to_int(j * s), radius);
      if (!h.valid || (h.dx == 0.0 && h.dy == 0.0)) continue;
      const double g = std::exp(-(i * i + j * j) / (2.0 * 2.5 * 2.5));
      samples.push_back({std::atan2(h.dy, h.dx), g * h.dx, g * h.dy});
    }
  }

  constexpr double pi = std::numbers::pi;
  double best_norm = 0.0;
  double best = 0.0;
  for (double start = -pi; start < pi; start += 0.15) {
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& smp : samples) {
      double rel = smp.angle - start;
      if (rel < 0.0) rel += 2.0 * pi;
      if (rel < pi / 3.0) {
        sx += smp.dx;
        sy += smp.dy;
      }
    }
    const double norm = sx * sx + sy * sy;
    if (norm > best_norm) {
      best_norm = norm;
      best = std::atan2(sy, sx);
    }
  }
  return best;
}

SurfDescriptor surf_descriptor(const IntegralImage& ii, const KeyPoint& kp, bool upright) {
  const double s = kp.scale;
  const double angle = upright ? 0.0 : kp.orientation.value_or(0.0);
  const double co = std::cos(angle);
  const double si = std::sin(angle);
  const int cx = round_to_int(kp.x);
  const int cy = round_to_int(kp.y);
  const int radius = std::max(1, round_to_int(s));
  const double sigma = 3.3 * s;

  SurfDescriptor desc;
  for (int row = 0; row < 20; ++row) {
    const double v = (row - 9.5) * s;
    for (int col = 0; col < 20; ++col) {
      const double u = (col - 9.5) * s;
      const int px = cx + round_to_int(u * co - v * si);
      const int py = cy + round_to_int(u * si + v * co);
      const Haar h = haar(ii, px, py, radius);
      if (!h.valid) continue;
      const double g = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
      const double dx = g * (h.dx * co + h.dy * si);
      const double dy = g * (-h.dx * si + h.dy * co);
      const std::size_t base = static_cast<std::size_t>((row / 5) * 4 + col / 5) * 4;
      desc.values[base + 0] += dx;
      desc.values[base + 1] += std::abs(dx);
      desc.values[base + 2] += dy;
      desc.values[base + 3] += std::abs(dy);
    }
  }

  double sq = 0.0;
  for (const double v : desc.values) sq += v * v;
  if (sq == 0.0) {
    desc.degenerate = true;
    return desc;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : desc.values) v *= inv;
  return desc;
}

SurfDescriptor surf_descriptor(const Image& img, const KeyPoint& kp, bool upright) {
  return surf_descriptor(IntegralImage(rowsum_energy(img)), kp, upright);
}

void SurfConfig::validate() const {
  validate_sizes(sizes);
  if (sizes.size() < 3) {
    throw Error(ErrorCode::invalid_argument, "at least three filter sizes are required");
  }
  if (!(hessian_weight >= 0.0) || !std::isfinite(hessian_weight)) {
    throw Error(ErrorCode::invalid_argument, "hessian weight must be finite and >= 0");
  }
  if (!(relative_threshold >= 0.0 && relative_threshold <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "relative threshold must lie in [0, 1]");
  }
  if (absolute_threshold && !std::isfinite(*absolute_threshold)) {
    throw Error(ErrorCode::invalid_argument, "absolute threshold must be finite");
  }
}

SurfResult detect_surf(const Image& img, const SurfConfig& cfg) {
  cfg.validate();
  if (img.width() < cfg.sizes.front() || img.height() < cfg.sizes.front()) {
    throw Error(ErrorCode::image_too_small,
                "image must be at least " + std::to_string(cfg.sizes.front()) +
                    " pixels in both dimensions");
  }
  const IntegralImage ii(rowsum_energy(img));
  const auto layers = build_layers(ii, cfg.sizes, cfg.hessian_weight);

  double threshold = 0.0;
  if (cfg.absolute_threshold) {
    threshold = *cfg.absolute_threshold;
  } else {
    double peak = 0.0;
    for (const auto& layer : layers) {
      for (const double v : layer.responses.values()) peak = std::max(peak, v);
    }
    threshold = cfg.relative_threshold * peak;
  }

  SurfResult result;
  result.keypoints = nms_3x3x3(layers, threshold);
  std::stable_sort(result.keypoints.begin(), result.keypoints.end(),
                   [](const KeyPoint& a, const KeyPoint& b) { return a.score > b.score; });
  if (cfg.descriptors) {
    result.descriptors.reserve(result.keypoints.size());
    for (auto& kp : result.keypoints) {
      if (!cfg.upright) kp.orientation = dominant_orientation(ii, kp);
      result.descriptors.push_back(surf_descriptor(ii, kp, cfg.upright));
    }
  }
  return result;
}

}  // namespace fkp::surf
