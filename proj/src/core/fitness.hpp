#pragma once

#include <functional>

#include "core/grid.hpp"
#include "core/image.hpp"

namespace fkp {

/// Target luminance band, 0 <= low <= high <= 1.
struct Band {
  double low = 0.9;
  double high = 1.0;

  void validate() const;

  static constexpr Band dark() { return {0.0, 0.1}; }
  static constexpr Band bright() { return {0.9, 1.0}; }
};

inline constexpr double kDefaultFalloff = 0.25;

/// 1 inside the band, decaying linearly to 0 at `falloff` luminance units away.
/// falloff == 0 gives a hard step.
double band_fitness(double lum, Band band, double falloff = kDefaultFalloff);

/// Per-pixel fitness in [0, 1], precomputed once per image. Any per-pixel
/// function can be plugged in through from_function.
class FitnessField {
 public:
  FitnessField(const Image& img, Band band, double falloff = kDefaultFalloff);

  static FitnessField from_function(int width, int height,
                                    const std::function<double(int, int)>& fn);

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }

  double operator()(int x, int y) const noexcept { return values_(x, y); }
  double at(int x, int y) const;

 private:
  explicit FitnessField(Grid<double> values) : values_(std::move(values)) {}

  Grid<double> values_;
};

inline double fitness(const FitnessField& field, int x, int y) { return field.at(x, y); }

/// Pixels whose luminance lies inside the band.
Grid<std::uint8_t> band_mask(const Image& img, Band band);

}  // namespace fkp
