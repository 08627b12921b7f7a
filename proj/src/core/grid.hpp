#pragma once

#include <cstddef>
#include <vector>

#include "core/error.hpp"

namespace fkp {

/// Dense row-major 2D array addressed as (x, y).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorCode::invalid_argument, "grid dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  T& at(int x, int y) {
    check(x, y);
    return data_[index(x, y)];
  }
  const T& at(int x, int y) const {
    check(x, y);
    return data_[index(x, y)];
  }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  void check(int x, int y) const {
    if (!contains(x, y)) {
      throw Error(ErrorCode::out_of_range, "grid coordinate out of range");
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace fkp
