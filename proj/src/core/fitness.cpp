#include "core/fitness.hpp"

#include <algorithm>
#include <cmath>

namespace fkp {

void Band::validate() const {
  if (!(low >= 0.0 && high <= 1.0 && low <= high)) {
    throw Error(ErrorCode::invalid_argument, "band must satisfy 0 <= low <= high <= 1");
  }
}

double band_fitness(double lum, Band band, double falloff) {
  if (lum >= band.low && lum <= band.high) {
    return 1.0;
  }
  if (falloff <= 0.0) {
    return 0.0;
  }
  const double distance = lum < band.low ? band.low - lum : lum - band.high;
  return std::max(0.0, 1.0 - distance / falloff);
}

FitnessField::FitnessField(const Image& img, Band band, double falloff) {
  band.validate();
  if (!(falloff >= 0.0) || !std::isfinite(falloff)) {
    throw Error(ErrorCode::invalid_argument, "falloff must be finite and >= 0");
  }
  Grid<double> values(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      values(x, y) = band_fitness(luminance(img, x, y), band, falloff);
    }
  }
  values_ = std::move(values);
}

FitnessField FitnessField::from_function(int width, int height,
                                         const std::function<double(int, int)>& fn) {
  Grid<double> values(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      values(x, y) = std::clamp(fn(x, y), 0.0, 1.0);
    }
  }
  return FitnessField(std::move(values));
}

double FitnessField::at(int x, int y) const {
  if (!values_.contains(x, y)) {
    throw Error(ErrorCode::out_of_range, "fitness coordinate out of range");
  }
  return values_(x, y);
}

Grid<std::uint8_t> band_mask(const Image& img, Band band) {
  band.validate();
  Grid<std::uint8_t> mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double lum = luminance(img, x, y);
      mask(x, y) = (lum >= band.low && lum <= band.high) ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace fkp
