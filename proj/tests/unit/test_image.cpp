#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "core/fitness.hpp"
#include "core/image.hpp"
#include "core/integral.hpp"
#include "support/oracles.hpp"

using fkp::Error;
using fkp::ErrorCode;
using fkp::Grid;
using fkp::Image;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    (void)fkp::read_pnm(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("P5 2x2 gray decodes row-major") {
  const auto img = fkp::read_pnm(bytes_of("P5 2 2 255\n", {0, 255, 255, 0}));
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(img.channels() == 1);
  CHECK(img(0, 0) == 0);
  CHECK(img(1, 0) == 255);
  CHECK(img(0, 1) == 255);
  CHECK(img(1, 1) == 0);
}

TEST_CASE("P6 2x1 decodes to red then blue") {
  const auto img = fkp::read_pnm(bytes_of("P6\n2 1\n255\n", {255, 0, 0, 0, 0, 255}));
  CHECK(img.channels() == 3);
  CHECK(img(0, 0, 0) == 255);
  CHECK(img(0, 0, 2) == 0);
  CHECK(img(1, 0, 0) == 0);
  CHECK(img(1, 0, 2) == 255);
}

TEST_CASE("header comments are skipped") {
  const auto img = fkp::read_pnm(bytes_of("P5\n# made by hand\n1 # w\n1\n255\n", {42}));
  CHECK(img(0, 0) == 42);
}

TEST_CASE("payload may begin with a whitespace byte value") {
  const auto img = fkp::read_pnm(bytes_of("P5 2 1 255\n", {'\n', ' '}));
  CHECK(img(0, 0) == '\n');
  CHECK(img(1, 0) == ' ');
}

TEST_CASE("decoder errors are distinct and carry offsets") {
  CHECK(decode_error(bytes_of("P4 1 1\n", {0})) == ErrorCode::unsupported_format);
  CHECK(decode_error(bytes_of("P2 1 1 255\n", {0})) == ErrorCode::unsupported_format);
  CHECK(decode_error(bytes_of("XX", {})) == ErrorCode::malformed_header);
  CHECK(decode_error(bytes_of("P5 a 1 255\n", {0})) == ErrorCode::malformed_header);
  CHECK(decode_error(bytes_of("P5 0 1 255\n", {})) == ErrorCode::malformed_header);
  CHECK(decode_error(bytes_of("P5 1 1 65535\n", {0, 0})) == ErrorCode::unsupported_maxval);
  CHECK(decode_error(bytes_of("P5 2 2 255\n", {1, 2, 3})) == ErrorCode::truncated_payload);
  CHECK(decode_error({}) == ErrorCode::malformed_header);

  try {
    (void)fkp::read_pnm(bytes_of("P5 1 1 16\n", {0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_maxval);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() == 7);  // where "16" starts
  }
}

TEST_CASE("1x1 zero image encodes to header plus one byte") {
  const auto bytes = fkp::write_pnm(Image(1, 1, 1));
  CHECK(bytes == bytes_of("P5\n1 1\n255\n", {0}));
}

TEST_CASE("PNM round trip on random gray and RGB images") {
  std::mt19937_64 rng(11);
  for (int channels : {1, 3}) {
    for (int trial = 0; trial < 25; ++trial) {
      std::uniform_int_distribution<int> dim(1, 24);
      const auto img = oracle::random_image(rng, dim(rng), dim(rng), channels);
      CHECK(fkp::read_pnm(fkp::write_pnm(img)) == img);
    }
  }
}

TEST_CASE("write after read reproduces canonical bytes") {
  const auto canonical = bytes_of("P6\n2 1\n255\n", {1, 2, 3, 4, 5, 6});
  CHECK(fkp::write_pnm(fkp::read_pnm(canonical)) == canonical);
}

TEST_CASE("rowsum energy") {
  Image rgb(2, 1, 3, {255, 255, 255, 0, 0, 0});
  const auto e = fkp::rowsum_energy(rgb);
  CHECK(e(0, 0) == 195075);
  CHECK(e(1, 0) == 0);
  Image gray(1, 1, 1, {10});
  CHECK(fkp::rowsum_energy(gray)(0, 0) == 300);
}

TEST_CASE("integral image small cases") {
  const Grid<std::int64_t> ones(2, 2, 1);
  const fkp::IntegralImage ii(ones);
  CHECK(ii.box_sum(0, 0, 2, 2) == 4);
  CHECK(ii.box_sum(1, 1, 1, 2) == 0);
  const fkp::IntegralImage single(Grid<std::int64_t>(1, 1, 7));
  CHECK(single.box_sum(0, 0, 1, 1) == 7);
  CHECK_THROWS_AS((void)ii.box_sum(0, 0, 3, 1), Error);
}

TEST_CASE("integral box sums match naive sums on random grids up to 64x64") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::random_grid(rng, dim(rng), dim(rng), 195075);
    const fkp::IntegralImage ii(g);
    std::uniform_int_distribution<int> px(0, g.width());
    std::uniform_int_distribution<int> py(0, g.height());
    for (int r = 0; r < 200; ++r) {
      int x0 = px(rng), x1 = px(rng), y0 = py(rng), y1 = py(rng);
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      REQUIRE(ii.box_sum(x0, y0, x1, y1) == oracle::naive_sum(g, x0, y0, x1, y1));
    }
  }
}

TEST_CASE("clipped box equals the sum over its intersection with the image") {
  Grid<std::int64_t> g(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) g(x, y) = x + 10 * y;
  const fkp::IntegralImage ii(g);
  CHECK(ii.box(-2, -1, 4, 3) == oracle::naive_sum(g, 0, 0, 2, 2));
  CHECK(ii.box(3, 2, 10, 10) == oracle::naive_sum(g, 3, 2, 5, 4));
  CHECK(ii.box(10, 10, 2, 2) == 0);
}

TEST_CASE("integral accumulator overflow is reported") {
  Grid<std::int64_t> g(2, 1, std::numeric_limits<std::int64_t>::max() / 2 + 1);
  CHECK_THROWS_AS(fkp::IntegralImage{g}, Error);
  try {
    fkp::IntegralImage ii{g};
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::overflow);
  }
}

TEST_CASE("luminance endpoints and Rec.601 weights") {
  Image gray(2, 1, 1, {255, 0});
  CHECK(fkp::luminance(gray, 0, 0) == 1.0);
  CHECK(fkp::luminance(gray, 1, 0) == 0.0);
  Image white(1, 1, 3, {255, 255, 255});
  CHECK(fkp::luminance(white, 0, 0) == 1.0);
  Image green(1, 1, 3, {0, 255, 0});
  CHECK(fkp::luminance(green, 0, 0) == doctest::Approx(0.587).epsilon(1e-12));
  CHECK_THROWS_AS((void)fkp::luminance(gray, 2, 0), Error);
}

TEST_CASE("luminance is bounded and monotone in each channel") {
  for (int c = 0; c < 3; ++c) {
    double previous = -1.0;
    for (int v = 0; v <= 255; ++v) {
      Image px(1, 1, 3, {90, 140, 200});
      px(0, 0, c) = static_cast<std::uint8_t>(v);
      const double l = fkp::luminance(px, 0, 0);
      CHECK(l >= 0.0);
      CHECK(l <= 1.0);
      CHECK(l >= previous);
      previous = l;
    }
  }
}

TEST_CASE("band fitness values") {
  CHECK(fkp::band_fitness(0.95, fkp::Band::bright()) == 1.0);
  CHECK(fkp::band_fitness(0.05, fkp::Band::dark()) == 1.0);
  CHECK(fkp::band_fitness(0.65, fkp::Band::bright(), 0.25) == 0.0);
  CHECK(fkp::band_fitness(0.8, fkp::Band::bright(), 0.25) == doctest::Approx(0.6));
  CHECK(fkp::band_fitness(0.89, fkp::Band::bright(), 0.0) == 0.0);
  CHECK(fkp::band_fitness(0.9, fkp::Band::bright(), 0.0) == 1.0);
  CHECK_THROWS_AS(fkp::Band({0.5, 0.4}).validate(), Error);
  CHECK_THROWS_AS(fkp::Band({-0.1, 0.4}).validate(), Error);
}

TEST_CASE("band fitness is piecewise linear and continuous") {
  const fkp::Band band{0.4, 0.6};
  double previous = fkp::band_fitness(0.0, band);
  for (int i = 1; i <= 10000; ++i) {
    const double lum = i / 10000.0;
    const double f = fkp::band_fitness(lum, band);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(std::abs(f - previous) <= 1.0 / 0.25 / 10000.0 + 1e-12);
    if (lum >= 0.4 && lum <= 0.6) CHECK(f == 1.0);
    if (lum <= 0.15 - 1e-12 || lum >= 0.85 + 1e-12) CHECK(f == 0.0);
    previous = f;
  }
}

TEST_CASE("fitness field lookups") {
  Image img(2, 1, 1, {255, 0});
  const fkp::FitnessField field(img, fkp::Band::bright());
  CHECK(fkp::fitness(field, 0, 0) == 1.0);
  CHECK(fkp::fitness(field, 1, 0) == 0.0);
  CHECK_THROWS_AS((void)fkp::fitness(field, 0, 1), Error);
  const auto custom = fkp::FitnessField::from_function(3, 2, [](int x, int y) { return x * 0.1 + y * 0.5; });
  CHECK(custom(2, 1) == doctest::Approx(0.7));
  const auto clamped = fkp::FitnessField::from_function(1, 1, [](int, int) { return 3.0; });
  CHECK(clamped(0, 0) == 1.0);
  const auto mask = fkp::band_mask(img, fkp::Band::bright());
  CHECK(mask(0, 0) == 1);
  CHECK(mask(1, 0) == 0);
}
