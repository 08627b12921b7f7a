#include "core/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace fkp {

Image::Image(int width, int height, int channels)
    : Image(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)) *
                                      static_cast<std::size_t>(std::max(channels, 0)))) {}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::invalid_argument, "image dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::invalid_argument, "image must have 1 or 3 channels");
  }
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(channels);
  if (data_.size() != expected) {
    throw Error(ErrorCode::invalid_argument, "image data length does not match dimensions");
  }
}

std::uint8_t Image::at(int x, int y, int c) const {
  if (!contains(x, y) || c < 0 || c >= channels_) {
    throw Error(ErrorCode::out_of_range, "pixel coordinate out of range");
  }
  return (*this)(x, y, c);
}

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const noexcept { return pos_; }
  /// Offset of the most recently read token.
  std::size_t token_start() const noexcept { return token_start_; }

  // Skips whitespace and '#' comments, then reads one unsigned decimal token.
  long long next_number(const char* what) {
    for (;;) {
      if (pos_ >= bytes_.size()) {
        throw Error(ErrorCode::malformed_header,
                    std::string("unexpected end of header before ") + what, pos_);
      }
      const auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    token_start_ = start;
    long long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000LL) {
        throw Error(ErrorCode::malformed_header, std::string(what) + " is too large", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw Error(ErrorCode::malformed_header, std::string("expected ") + what, start);
    }
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::malformed_header, "expected whitespace after maxval", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

}  // namespace

Image read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorCode::malformed_header, "missing PNM magic number", 0);
  }
  int channels = 0;
  switch (bytes[1]) {
    case '5': channels = 1; break;
    case '6': channels = 3; break;
    case '1':
    case '2':
    case '3':
    case '4':
    case '7':
      throw Error(ErrorCode::unsupported_format,
                  std::string("unsupported PNM variant P") + static_cast<char>(bytes[1]), 0);
    default:
      throw Error(ErrorCode::malformed_header, "missing PNM magic number", 0);
  }
  if (bytes.size() < 3 || !(std::isspace(bytes[2]) || bytes[2] == '#')) {
    throw Error(ErrorCode::malformed_header, "expected whitespace after magic number", 2);
  }

  HeaderReader header(bytes, 2);
  const auto width = header.next_number("width");
  const auto width_start = header.token_start();
  const auto height = header.next_number("height");
  const auto height_start = header.token_start();
  const auto maxval = header.next_number("maxval");
  const auto maxval_start = header.token_start();
  if (width == 0) {
    throw Error(ErrorCode::malformed_header, "width must be positive", width_start);
  }
  if (height == 0) {
    throw Error(ErrorCode::malformed_header, "height must be positive", height_start);
  }
  if (maxval == 0 || maxval > 65535) {
    throw Error(ErrorCode::malformed_header, "maxval out of range", maxval_start);
  }
  if (maxval != 255) {
    throw Error(ErrorCode::unsupported_maxval,
                "unsupported maxval " + std::to_string(maxval) + " (only 255)", maxval_start);
  }
  header.single_whitespace();
  const std::size_t payload_start = header.pos();

  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(channels);
  const std::size_t available = bytes.size() - payload_start;
  if (available < expected) {
    throw Error(ErrorCode::truncated_payload,
                "payload has " + std::to_string(available) + " of " +
                    std::to_string(expected) + " bytes",
                bytes.size());
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(payload_start);
  std::vector<std::uint8_t> data(first, first + static_cast<std::ptrdiff_t>(expected));
  return Image(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

std::vector<std::uint8_t> write_pnm(const Image& img) {
  const std::string header = std::string(img.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_pnm(bytes);
}

void save_pnm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  }
  const auto bytes = write_pnm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::io, "write failed for " + path);
  }
}

Grid<std::int64_t> rowsum_energy(const Image& img) {
  Grid<std::int64_t> grid(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::int64_t sum = 0;
      if (img.channels() == 1) {
        const std::int64_t v = img(x, y);
        sum = 3 * v * v;
      } else {
        for (int c = 0; c < 3; ++c) {
          const std::int64_t v = img(x, y, c);
          sum += v * v;
        }
      }
      grid(x, y) = sum;
    }
  }
  return grid;
}

double luminance(const Image& img, int x, int y) {
  if (!img.contains(x, y)) {
    throw Error(ErrorCode::out_of_range, "luminance coordinate out of range");
  }
  if (img.channels() == 1) {
    return img(x, y) / 255.0;
  }
  const double luma = 0.299 * img(x, y, 0) + 0.587 * img(x, y, 1) + 0.114 * img(x, y, 2);
  return std::clamp(luma / 255.0, 0.0, 1.0);
}

Grid<double> luminance_grid(const Image& img) {
  Grid<double> grid(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      grid(x, y) = luminance(img, x, y);
    }
  }
  return grid;
}

Image to_rgb(const Image& img) {
  if (img.channels() == 3) {
    return img;
  }
  Image rgb(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) rgb(x, y, c) = img(x, y);
    }
  }
  return rgb;
}

}  // namespace fkp
