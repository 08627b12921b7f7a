#pragma once

#include <cstdint>
#include <vector>

#include "core/grid.hpp"

namespace fkp {

/// Summed-area table with a zero first row and column: table(x, y) is the sum
/// of source values over [0, x) x [0, y). Immutable after construction.
class IntegralImage {
 public:
  /// Throws ErrorCode::overflow instead of wrapping the 64-bit accumulator.
  explicit IntegralImage(const Grid<std::int64_t>& source);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::int64_t table(int x, int y) const noexcept {
    return table_[static_cast<std::size_t>(y) * stride_ + static_cast<std::size_t>(x)];
  }

  /// Sum over the half-open rectangle [x0, x1) x [y0, y1). Empty when x1 <= x0 or y1 <= y0.
  std::int64_t box_sum(int x0, int y0, int x1, int y1) const;

  /// Sum over a rectangle given by its top-left pixel and size, clipped to the image.
  std::int64_t box(int x, int y, int w, int h) const noexcept;

 private:
  int width_;
  int height_;
  std::size_t stride_;
  std::vector<std::int64_t> table_;
};

inline IntegralImage build_integral(const Grid<std::int64_t>& grid) { return IntegralImage(grid); }

}  // namespace fkp
