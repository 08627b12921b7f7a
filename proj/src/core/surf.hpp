#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/image.hpp"
#include "core/integral.hpp"
#include "core/keypoint.hpp"

namespace fkp::surf {

inline constexpr double kDefaultHessianWeight = 0.9;

struct BoxHessian {
  double dxx = 0.0;
  double dyy = 0.0;
  double dxy = 0.0;
};

/// True when a filter of the given size centred at (x, y) lies inside the image.
bool filter_fits(int width, int height, int x, int y, int filter_size) noexcept;

/// Box-filter approximations of the Gaussian second derivatives at (x, y),
/// each normalised by the filter area. filter_size must be an odd multiple of 3.
BoxHessian box_hessian(const IntegralImage& ii, int x, int y, int filter_size);

/// dxx * dyy - (weight * dxy)^2
double hessian_det(double dxx, double dyy, double dxy,
                   double weight = kDefaultHessianWeight) noexcept;

/// Gaussian scale equivalent of a box filter (9 -> 1.2).
inline double filter_sigma(double filter_size) noexcept { return 1.2 * filter_size / 9.0; }

struct ResponseLayer {
  int filter_size = 0;
  Grid<double> responses;           // 0 where the filter does not fit
  Grid<std::uint8_t> laplacian_sign;  // 1 when dxx + dyy >= 0
};

std::vector<ResponseLayer> build_layers(const IntegralImage& ii, std::span<const int> sizes,
                                        double weight = kDefaultHessianWeight);

/// Points whose response exceeds `threshold` and every one of the 26 neighbours
/// in (x, y, layer). Only middle layers and interior pixels are tested. The
/// reported scale is interpolated between adjacent layers from a parabola fit.
std::vector<KeyPoint> nms_3x3x3(const std::vector<ResponseLayer>& layers, double threshold);

struct SurfDescriptor {
  std::array<double, 64> values{};
  bool degenerate = false;  // constant support window, values all zero
};

/// Dominant Haar-response direction in a radius-6s disc around the keypoint.
double dominant_orientation(const IntegralImage& ii, const KeyPoint& kp);

/// 4x4 subregions x (sum dx, sum |dx|, sum dy, sum |dy|) over a 20s window,
/// L2-normalised. Upright skips orientation; otherwise kp.orientation is used
/// (0 when unset). Samples whose wavelet leaves the image are dropped.
SurfDescriptor surf_descriptor(const IntegralImage& ii, const KeyPoint& kp, bool upright = true);
SurfDescriptor surf_descriptor(const Image& img, const KeyPoint& kp, bool upright = true);

struct SurfConfig {
  std::vector<int> sizes{9, 15, 21, 27};
  double hessian_weight = kDefaultHessianWeight;
  double relative_threshold = 0.1;  // of the stack maximum
  std::optional<double> absolute_threshold;
  bool descriptors = false;
  bool upright = true;

  void validate() const;
};

struct SurfResult {
  std::vector<KeyPoint> keypoints;  // descending score
  std::vector<SurfDescriptor> descriptors;  // parallel to keypoints when requested
};

SurfResult detect_surf(const Image& img, const SurfConfig& cfg = {});

}  // namespace fkp::surf
