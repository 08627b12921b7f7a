#pragma once

#include <array>
#include <optional>
#include <vector>

#include "core/grid.hpp"
#include "core/image.hpp"
#include "core/keypoint.hpp"

namespace fkp::sift {

/// Normalised 1D kernel of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge replication.
Grid<double> gaussian_blur(const Grid<double>& grid, double sigma);

/// Gaussian scale space: grid (o, s) carries blur base_sigma * 2^(o + s / S)
/// in base-image pixels, S = scales_per_octave grids per octave. Octave o is
/// sampled every 2^o pixels.
struct ScaleSpace {
  double base_sigma = 1.6;
  int scales_per_octave = 0;
  std::vector<std::vector<Grid<double>>> octaves;

  double sigma(int octave, double scale) const;
};

/// floor(log2(min(w, h) / 8)), at least 1.
int auto_octaves(int width, int height) noexcept;

/// octaves == 0 selects auto_octaves. Works on luminance in [0, 1].
ScaleSpace build_scale_space(const Image& img, double base_sigma, int scales_per_octave,
                             int octaves = 0);
ScaleSpace build_scale_space(const Grid<double>& luminance, double base_sigma,
                             int scales_per_octave, int octaves = 0);

struct DogPyramid {
  double base_sigma = 1.6;
  int scales_per_octave = 0;
  std::vector<std::vector<Grid<double>>> octaves;  // scales_per_octave - 1 per octave
};

DogPyramid build_dog(const ScaleSpace& ss);

struct Extremum {
  int octave = 0;
  int scale = 0;  // DoG index within the octave
  int x = 0;
  int y = 0;

  friend bool operator==(const Extremum&, const Extremum&) = default;
};

/// |D| > contrast_threshold and strictly above or strictly below all 26
/// neighbours. Interior DoG levels and interior pixels only.
std::vector<Extremum> find_extrema(const DogPyramid& dog, double contrast_threshold);

enum class Rejection { none, singular, unstable, low_contrast, edge };

const char* to_string(Rejection r) noexcept;

struct RefineOptions {
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;
  int max_steps = 5;
};

struct Refined {
  KeyPoint keypoint;
  std::array<double, 3> offset{};  // (x, y, scale) Taylor offset at the final sample
  Extremum sample;                 // integer location the offset is relative to
};

struct RefineResult {
  std::optional<Refined> refined;
  Rejection reason = Rejection::none;
};

/// Quadratic (second-order Taylor) localisation of a DoG extremum, followed by
/// contrast and principal-curvature checks. A singular system whose spatial
/// part already fails the curvature test is reported as an edge.
RefineResult refine_keypoint(const DogPyramid& dog, const Extremum& raw,
                             const RefineOptions& options = {});

struct SiftConfig {
  double base_sigma = 1.6;
  int scales_per_octave = 6;
  int octaves = 0;
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;

  void validate() const;
};

/// Accepted keypoints with their refinement details, by descending |score|.
std::vector<Refined> detect_sift_detailed(const Image& img, const SiftConfig& cfg = {});
std::vector<KeyPoint> detect_sift(const Image& img, const SiftConfig& cfg = {});

}  // namespace fkp::sift
