#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace fkp {

/// 8-bit raster, 1 (gray) or 3 (RGB) interleaved channels, row-major top-to-bottom.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels);
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::uint8_t& operator()(int x, int y, int c = 0) noexcept { return data_[offset(x, y, c)]; }
  std::uint8_t operator()(int x, int y, int c = 0) const noexcept {
    return data_[offset(x, y, c)];
  }
  std::uint8_t at(int x, int y, int c = 0) const;

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Decodes binary P5/P6 with maxval 255. Header comments are accepted.
Image read_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pnm(const Image& img);

Image load_pnm(const std::string& path);
void save_pnm(const Image& img, const std::string& path);

/// Per-pixel R^2 + G^2 + B^2; gray pixels count as R = G = B.
Grid<std::int64_t> rowsum_energy(const Image& img);

/// Rec.601 luma scaled to [0, 1].
double luminance(const Image& img, int x, int y);

Grid<double> luminance_grid(const Image& img);

Image to_rgb(const Image& img);

}  // namespace fkp
