#include "core/sift.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace fkp::sift {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::invalid_argument, "sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;
  return kernel;
}

Grid<double> gaussian_blur(const Grid<double>& grid, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = grid.width();
  const int h = grid.height();

  Grid<double> horizontal(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] * grid(std::clamp(x + k, 0, w - 1), y);
      }
      horizontal(x, y) = acc;
    }
  }
  Grid<double> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               horizontal(x, std::clamp(y + k, 0, h - 1));
      }
      out(x, y) = acc;
    }
  }
  return out;
}

double ScaleSpace::sigma(int octave, double scale) const {
  return base_sigma * std::exp2(octave + scale / scales_per_octave);
}

int auto_octaves(int width, int height) noexcept {
  const int smallest = std::min(width, height);
  if (smallest < 16) return 1;
  return std::max(1, static_cast<int>(std::floor(std::log2(smallest / 8.0))));
}

namespace {

Grid<double> downsample(const Grid<double>& g) {
  Grid<double> out(g.width() / 2, g.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = g(2 * x, 2 * y);
  }
  return out;
}

}  // namespace

ScaleSpace build_scale_space(const Grid<double>& luminance, double base_sigma,
                             int scales_per_octave, int octaves) {
  if (luminance.width() < 16 || luminance.height() < 16) {
    throw Error(ErrorCode::image_too_small, "scale space needs at least 16x16 pixels");
  }
  if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) {
    throw Error(ErrorCode::invalid_argument, "base sigma must be positive");
  }
  if (scales_per_octave < 3) {
    throw Error(ErrorCode::invalid_argument, "scales per octave must be >= 3");
  }
  if (octaves == 0) octaves = auto_octaves(luminance.width(), luminance.height());
  if (octaves < 0 ||
      (std::min(luminance.width(), luminance.height()) >> (octaves - 1)) < 8) {
    throw Error(ErrorCode::invalid_argument,
                "octave count would shrink the image below 8x8");
  }

  ScaleSpace ss;
  ss.base_sigma = base_sigma;
  ss.scales_per_octave = scales_per_octave;
  const int per_octave = scales_per_octave;

  // Within an octave the grid at scale s has blur base * 2^(s/S) in octave pixels.
  auto own_sigma = [&](int s) { return base_sigma * std::exp2(static_cast<double>(s) / per_octave); };

  Grid<double> seed = gaussian_blur(luminance, base_sigma);
  for (int o = 0; o < octaves; ++o) {
    std::vector<Grid<double>> level;
    level.reserve(static_cast<std::size_t>(per_octave));
    level.push_back(std::move(seed));
    for (int s = 1; s < per_octave; ++s) {
      const double inc = std::sqrt(own_sigma(s) * own_sigma(s) - own_sigma(s - 1) * own_sigma(s - 1));
      level.push_back(gaussian_blur(level.back(), inc));
    }
    if (o + 1 < octaves) {
      const double last = own_sigma(per_octave - 1);
      const double target = 2.0 * base_sigma;
      seed = downsample(gaussian_blur(level.back(), std::sqrt(target * target - last * last)));
    }
    ss.octaves.push_back(std::move(level));
  }
  return ss;
}

ScaleSpace build_scale_space(const Image& img, double base_sigma, int scales_per_octave,
                             int octaves) {
  if (img.width() < 16 || img.height() < 16) {
    throw Error(ErrorCode::image_too_small, "scale space needs at least 16x16 pixels");
  }
  return build_scale_space(luminance_grid(img), base_sigma, scales_per_octave, octaves);
}

DogPyramid build_dog(const ScaleSpace& ss) {
  DogPyramid dog;
  dog.base_sigma = ss.base_sigma;
  dog.scales_per_octave = ss.scales_per_octave;
  for (const auto& level : ss.octaves) {
    std::vector<Grid<double>> diffs;
    for (std::size_t s = 0; s + 1 < level.size(); ++s) {
      Grid<double> d(level[s].width(), level[s].height());
      auto& out = d.values();
      const auto& lo = level[s].values();
      const auto& hi = level[s + 1].values();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = hi[i] - lo[i];
      diffs.push_back(std::move(d));
    }
    dog.octaves.push_back(std::move(diffs));
  }
  return dog;
}

std::vector<Extremum> find_extrema(const DogPyramid& dog, double contrast_threshold) {
  std::vector<Extremum> out;
  for (std::size_t o = 0; o < dog.octaves.size(); ++o) {
    const auto& level = dog.octaves[o];
    if (level.size() < 3) {
      throw Error(ErrorCode::invalid_argument, "extrema search needs >= 3 DoG grids per octave");
    }
    const int w = level.front().width();
    const int h = level.front().height();
    for (std::size_t s = 1; s + 1 < level.size(); ++s) {
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          const double v = level[s](x, y);
          if (!(std::abs(v) > contrast_threshold)) continue;
          bool is_max = true;
          bool is_min = true;
          for (std::size_t ds = s - 1; ds <= s + 1 && (is_max || is_min); ++ds) {
            for (int dy = -1; dy <= 1; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                if (ds == s && dx == 0 && dy == 0) continue;
                const double n = level[ds](x + dx, y + dy);
                if (n >= v) is_max = false;
                if (n <= v) is_min = false;
              }
            }
          }
          if (is_max || is_min) {
            out.push_back({static_cast<int>(o), static_cast<int>(s), x, y});
          }
        }
      }
    }
  }
  return out;
}

const char* to_string(Rejection r) noexcept {
  switch (r) {
    case Rejection::none: return "none";
    case Rejection::singular: return "singular";
    case Rejection::unstable: return "unstable";
    case Rejection::low_contrast: return "low-contrast";
    case Rejection::edge: return "edge";
  }
  return "?";
}

namespace {

struct LocalModel {
  Eigen::Vector3d gradient;
  Eigen::Matrix3d hessian;
};

LocalModel local_model(const std::vector<Grid<double>>& level, int s, int x, int y) {
  const auto& prev = level[static_cast<std::size_t>(s - 1)];
  const auto& cur = level[static_cast<std::size_t>(s)];
  const auto& next = level[static_cast<std::size_t>(s + 1)];
  const double v = cur(x, y);

  LocalModel m;
  m.gradient << 0.5 * (cur(x + 1, y) - cur(x - 1, y)), 0.5 * (cur(x, y + 1) - cur(x, y - 1)),
      0.5 * (next(x, y) - prev(x, y));

  const double dxx = cur(x + 1, y) + cur(x - 1, y) - 2.0 * v;
  const double dyy = cur(x, y + 1) + cur(x, y - 1) - 2.0 * v;
  const double dss = next(x, y) + prev(x, y) - 2.0 * v;
  const double dxy =
      0.25 * (cur(x + 1, y + 1) - cur(x - 1, y + 1) - cur(x + 1, y - 1) + cur(x - 1, y - 1));
  const double dxs =
      0.25 * (next(x + 1, y) - next(x - 1, y) - prev(x + 1, y) + prev(x - 1, y));
  const double dys =
      0.25 * (next(x, y + 1) - next(x, y - 1) - prev(x, y + 1) + prev(x, y - 1));
  m.hessian << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;
  return m;
}

bool passes_curvature(const Eigen::Matrix3d& h, double edge_ratio) {
  const double tr = h(0, 0) + h(1, 1);
  const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1);
  if (!(det > 0.0)) return false;
  return tr * tr * edge_ratio < (edge_ratio + 1.0) * (edge_ratio + 1.0) * det;
}

}  // namespace

RefineResult refine_keypoint(const DogPyramid& dog, const Extremum& raw,
                             const RefineOptions& options) {
  if (raw.octave < 0 || static_cast<std::size_t>(raw.octave) >= dog.octaves.size()) {
    throw Error(ErrorCode::out_of_range, "extremum octave out of range");
  }
  const auto& level = dog.octaves[static_cast<std::size_t>(raw.octave)];
  const int levels = static_cast<int>(level.size());
  const int w = level.front().width();
  const int h = level.front().height();
  auto interior = [&](int s, int x, int y) {
    return s >= 1 && s <= levels - 2 && x >= 1 && x <= w - 2 && y >= 1 && y <= h - 2;
  };
  if (!interior(raw.scale, raw.x, raw.y)) {
    throw Error(ErrorCode::out_of_range, "extremum lacks an interior 3x3x3 neighbourhood");
  }

  int s = raw.scale;
  int x = raw.x;
  int y = raw.y;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  LocalModel model;
  bool converged = false;
  for (int attempt = 0; attempt < options.max_steps; ++attempt) {
    model = local_model(level, s, x, y);
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(model.hessian);
    if (!lu.isInvertible()) {
      return {std::nullopt, passes_curvature(model.hessian, options.edge_ratio)
                                ? Rejection::singular
                                : Rejection::edge};
    }
    offset = -lu.solve(model.gradient);
    if (!offset.allFinite()) {
      return {std::nullopt, Rejection::singular};
    }
    if (offset.cwiseAbs().maxCoeff() <= 0.5) {
      converged = true;
      break;
    }
    if (offset.cwiseAbs().maxCoeff() > 1e6) {
      return {std::nullopt, Rejection::unstable};
    }
    x += static_cast<int>(std::lround(offset.x()));
    y += static_cast<int>(std::lround(offset.y()));
    s += static_cast<int>(std::lround(offset.z()));
    if (!interior(s, x, y)) {
      return {std::nullopt, Rejection::unstable};
    }
  }
  if (!converged) {
    return {std::nullopt, Rejection::unstable};
  }

  const double value =
      level[static_cast<std::size_t>(s)](x, y) + 0.5 * model.gradient.dot(offset);
  if (std::abs(value) < options.contrast_threshold) {
    return {std::nullopt, Rejection::low_contrast};
  }
  if (!passes_curvature(model.hessian, options.edge_ratio)) {
    return {std::nullopt, Rejection::edge};
  }

  const double step = std::exp2(raw.octave);
  Refined out;
  out.keypoint.x = (x + offset.x()) * step;
  out.keypoint.y = (y + offset.y()) * step;
  out.keypoint.scale =
      dog.base_sigma * std::exp2(raw.octave + (s + offset.z()) / dog.scales_per_octave);
  out.keypoint.score = value;
  out.keypoint.detector = Detector::sift;
  out.offset = {offset.x(), offset.y(), offset.z()};
  out.sample = {raw.octave, s, x, y};
  return {out, Rejection::none};
}

void SiftConfig::validate() const {
  if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) {
    throw Error(ErrorCode::invalid_argument, "base sigma must be positive");
  }
  if (scales_per_octave < 4) {
    throw Error(ErrorCode::invalid_argument,
                "scales per octave must be >= 4 so each octave has an interior DoG level");
  }
  if (octaves < 0) {
    throw Error(ErrorCode::invalid_argument, "octaves must be >= 0 (0 = auto)");
  }
  if (!(contrast_threshold >= 0.0) || !std::isfinite(contrast_threshold)) {
    throw Error(ErrorCode::invalid_argument, "contrast threshold must be >= 0");
  }
  if (!(edge_ratio >= 1.0) || !std::isfinite(edge_ratio)) {
    throw Error(ErrorCode::invalid_argument, "edge ratio must be >= 1");
  }
}

std::vector<Refined> detect_sift_detailed(const Image& img, const SiftConfig& cfg) {
  cfg.validate();
  if (img.width() < 16 || img.height() < 16) {
    throw Error(ErrorCode::image_too_small, "SIFT needs at least 16x16 pixels");
  }
  const auto ss = build_scale_space(img, cfg.base_sigma, cfg.scales_per_octave, cfg.octaves);
  const auto dog = build_dog(ss);
  const RefineOptions options{cfg.contrast_threshold, cfg.edge_ratio, 5};

  std::vector<Refined> out;
  for (const auto& raw : find_extrema(dog, cfg.contrast_threshold)) {
    auto result = refine_keypoint(dog, raw, options);
    if (result.refined) out.push_back(*result.refined);
  }
  std::stable_sort(out.begin(), out.end(), [](const Refined& a, const Refined& b) {
    return std::abs(a.keypoint.score) > std::abs(b.keypoint.score);
  });
  return out;
}

std::vector<KeyPoint> detect_sift(const Image& img, const SiftConfig& cfg) {
  std::vector<KeyPoint> out;
  for (const auto& r : detect_sift_detailed(img, cfg)) out.push_back(r.keypoint);
  return out;
}

}  // namespace fkp::sift
