#include "core/integral.hpp"

#include <algorithm>

namespace fkp {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorCode::overflow, "integral image accumulator overflow");
  }
  return out;
}

}  // namespace

IntegralImage::IntegralImage(const Grid<std::int64_t>& source)
    : width_(source.width()),
      height_(source.height()),
      stride_(static_cast<std::size_t>(source.width()) + 1) {
  if (source.empty()) {
    throw Error(ErrorCode::invalid_argument, "integral image of an empty grid");
  }
  table_.assign(stride_ * (static_cast<std::size_t>(height_) + 1), 0);
  for (int y = 0; y < height_; ++y) {
    std::int64_t row = 0;
    const std::size_t above = static_cast<std::size_t>(y) * stride_;
    const std::size_t here = above + stride_;
    for (int x = 0; x < width_; ++x) {
      row = checked_add(row, source(x, y));
      table_[here + static_cast<std::size_t>(x) + 1] =
          checked_add(table_[above + static_cast<std::size_t>(x) + 1], row);
    }
  }
}

std::int64_t IntegralImage::box_sum(int x0, int y0, int x1, int y1) const {
  if (x0 < 0 || y0 < 0 || x1 > width_ || y1 > height_) {
    throw Error(ErrorCode::out_of_range, "box outside integral image");
  }
  if (x1 <= x0 || y1 <= y0) {
    return 0;
  }
  return table(x1, y1) - table(x0, y1) - table(x1, y0) + table(x0, y0);
}

std::int64_t IntegralImage::box(int x, int y, int w, int h) const noexcept {
  const int x0 = std::clamp(x, 0, width_);
  const int y0 = std::clamp(y, 0, height_);
  const int x1 = std::clamp(x + w, 0, width_);
  const int y1 = std::clamp(y + h, 0, height_);
  if (x1 <= x0 || y1 <= y0) {
    return 0;
  }
  return table(x1, y1) - table(x0, y1) - table(x1, y0) + table(x0, y0);
}

}  // namespace fkp
