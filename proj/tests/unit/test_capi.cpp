// Exercises the shared library strictly through its C header.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"

#include "fkp/fkp.h"

namespace {

fkp_image* disc_fixture(fkp_image** mask = nullptr) {
  fkp_fixture_spec spec;
  fkp_fixture_spec_default(&spec);
  fkp_image* img = nullptr;
  fkp_image* m = nullptr;
  REQUIRE(fkp_fixture_create(&spec, &img, &m) == FKP_OK);
  if (mask) {
    *mask = m;
  } else {
    fkp_image_destroy(m);
  }
  return img;
}

std::string take_string(char* text) {
  std::string s(text);
  fkp_free(text);
  return s;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(fkp_version()) == "1.0.0");
  CHECK(std::string(fkp_status_name(FKP_OK)) == "ok");
  CHECK(std::string(fkp_status_name(FKP_ERR_TRUNCATED_PAYLOAD)) == "truncated-payload");
  CHECK(std::string(fkp_status_name(static_cast<fkp_status>(99))) == "unknown");
}

TEST_CASE("image create, encode, decode") {
  const uint8_t pixels[6] = {255, 0, 0, 0, 0, 255};
  fkp_image* img = nullptr;
  REQUIRE(fkp_image_create(2, 1, 3, pixels, &img) == FKP_OK);
  CHECK(fkp_image_width(img) == 2);
  CHECK(fkp_image_height(img) == 1);
  CHECK(fkp_image_channels(img) == 3);
  CHECK(std::memcmp(fkp_image_data(img), pixels, 6) == 0);

  uint8_t* bytes = nullptr;
  size_t length = 0;
  REQUIRE(fkp_image_encode_pnm(img, &bytes, &length) == FKP_OK);
  CHECK(std::string(reinterpret_cast<char*>(bytes), 11) == "P6\n2 1\n255\n");
  fkp_image* back = nullptr;
  REQUIRE(fkp_image_decode_pnm(bytes, length, &back) == FKP_OK);
  CHECK(std::memcmp(fkp_image_data(back), pixels, 6) == 0);
  fkp_free(bytes);

  double lum = -1;
  REQUIRE(fkp_image_luminance(back, 1, 0, &lum) == FKP_OK);
  CHECK(lum == doctest::Approx(0.114));
  CHECK(fkp_image_luminance(back, 2, 0, &lum) == FKP_ERR_OUT_OF_RANGE);
  fkp_image_destroy(back);
  fkp_image_destroy(img);

  fkp_image* blank = nullptr;
  REQUIRE(fkp_image_create(3, 2, 1, nullptr, &blank) == FKP_OK);
  CHECK(fkp_image_data(blank)[5] == 0);
  fkp_image_destroy(blank);
  CHECK(fkp_image_create(0, 2, 1, nullptr, &blank) == FKP_ERR_INVALID_ARGUMENT);
  CHECK(fkp_image_create(2, 2, 2, nullptr, &blank) == FKP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("decode errors map to distinct statuses with offsets") {
  fkp_image* img = nullptr;
  const std::string p4 = "P4 1 1\n\x01";
  CHECK(fkp_image_decode_pnm(reinterpret_cast<const uint8_t*>(p4.data()), p4.size(), &img) ==
        FKP_ERR_UNSUPPORTED_FORMAT);
  const std::string trunc = "P5 4 4 255\n\x01\x02";
  CHECK(fkp_image_decode_pnm(reinterpret_cast<const uint8_t*>(trunc.data()), trunc.size(), &img) ==
        FKP_ERR_TRUNCATED_PAYLOAD);
  CHECK(std::string(fkp_last_error()).find("byte offset 13") != std::string::npos);
  const std::string maxval = "P5 1 1 1023\n\x01\x02";
  CHECK(fkp_image_decode_pnm(reinterpret_cast<const uint8_t*>(maxval.data()), maxval.size(), &img) ==
        FKP_ERR_UNSUPPORTED_MAXVAL);
  const std::string header = "P5 1 x 255\n";
  CHECK(fkp_image_decode_pnm(reinterpret_cast<const uint8_t*>(header.data()), header.size(), &img) ==
        FKP_ERR_MALFORMED_HEADER);
  CHECK(img == nullptr);
  CHECK(fkp_image_decode_pnm(nullptr, 3, &img) == FKP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("file load and save") {
  const auto dir = std::filesystem::temp_directory_path() / "fkp_capi_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "disc.pgm").string();
  fkp_image* img = disc_fixture();
  REQUIRE(fkp_image_save(img, path.c_str()) == FKP_OK);
  fkp_image* back = nullptr;
  REQUIRE(fkp_image_load(path.c_str(), &back) == FKP_OK);
  CHECK(std::memcmp(fkp_image_data(img), fkp_image_data(back), 256 * 256) == 0);
  CHECK(fkp_image_save(img, "/nonexistent-dir/x.pgm") == FKP_ERR_IO);
  CHECK(fkp_image_load("/nonexistent-dir/x.pgm", &back) == FKP_ERR_IO);
  fkp_image_destroy(back);
  fkp_image_destroy(img);
  std::filesystem::remove_all(dir);
}

TEST_CASE("SFA through the C API") {
  fkp_image* mask = nullptr;
  fkp_image* img = disc_fixture(&mask);
  fkp_sfa_params p;
  fkp_sfa_params_default(&p);
  CHECK(p.fireflies == 400);
  CHECK(p.generations == 20);
  CHECK(p.best_ratio == 0.35);
  CHECK(p.band.low == 0.9);
  fkp_keypoints* kps = nullptr;
  REQUIRE(fkp_detect_sfa(img, &p, &kps) == FKP_OK);
  CHECK(fkp_keypoints_count(kps) == 140u);
  fkp_keypoint k;
  REQUIRE(fkp_keypoints_get(kps, 0, &k) == FKP_OK);
  CHECK(k.detector == FKP_DETECTOR_SFA);
  CHECK(k.has_orientation == 0);
  CHECK(fkp_keypoints_get(kps, 140, &k) == FKP_ERR_OUT_OF_RANGE);

  fkp_report* report = nullptr;
  REQUIRE(fkp_report_compute(mask, kps, 12.5, FKP_DETECTOR_SFA, R"({"seed": 0})", &report) == FKP_OK);
  fkp_report_metrics m;
  REQUIRE(fkp_report_metrics_get(report, &m) == FKP_OK);
  CHECK(m.keypoint_count == 140u);
  CHECK(m.mask_components == 1u);
  CHECK(m.elapsed_ms == 12.5);
  CHECK(m.precision >= 0.9);

  char* json = nullptr;
  REQUIRE(fkp_report_to_json(report, &json) == FKP_OK);
  fkp_report* back = nullptr;
  REQUIRE(fkp_report_from_json(json, &back) == FKP_OK);
  fkp_free(json);
  CHECK(fkp_report_equal(report, back) == 1);
  CHECK(fkp_report_from_json("not json", &back) == FKP_ERR_PARSE);
  fkp_report* bad = nullptr;
  CHECK(fkp_report_compute(mask, kps, 1.0, FKP_DETECTOR_SFA, "[1, 2]", &bad) ==
        FKP_ERR_PARSE);

  fkp_keypoints* again = nullptr;
  REQUIRE(fkp_detect_sfa(img, &p, &again) == FKP_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(fkp_keypoints_to_csv(kps, &a) == FKP_OK);
  REQUIRE(fkp_keypoints_to_csv(again, &b) == FKP_OK);
  CHECK(take_string(a) == take_string(b));

  p.best_ratio = 1.5;
  fkp_keypoints* none = nullptr;
  CHECK(fkp_detect_sfa(img, &p, &none) == FKP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fkp_last_error()).find("best_ratio") != std::string::npos);
  CHECK(none == nullptr);

  fkp_report_destroy(back);
  fkp_report_destroy(report);
  fkp_keypoints_destroy(again);
  fkp_keypoints_destroy(kps);
  fkp_image_destroy(mask);
  fkp_image_destroy(img);
}

TEST_CASE("SURF and SIFT through the C API") {
  fkp_fixture_spec spec;
  fkp_fixture_spec_default(&spec);
  spec.kind = FKP_FIXTURE_BLOB_GRID;
  spec.width = 128;
  spec.height = 128;
  fkp_image* img = nullptr;
  fkp_image* mask = nullptr;
  REQUIRE(fkp_fixture_create(&spec, &img, &mask) == FKP_OK);

  fkp_sift_params sp;
  fkp_sift_params_default(&sp);
  CHECK(sp.base_sigma == 1.6);
  CHECK(sp.contrast_threshold == 0.03);
  fkp_keypoints* kps = nullptr;
  REQUIRE(fkp_detect_sift(img, &sp, &kps) == FKP_OK);
  CHECK(fkp_keypoints_count(kps) == 9u);
  fkp_keypoints_destroy(kps);

  // SURF's smallest filter responds best to blobs of sigma ~4 here.
  fkp_image_destroy(img);
  fkp_image_destroy(mask);
  spec.sigma = 4;
  REQUIRE(fkp_fixture_create(&spec, &img, &mask) == FKP_OK);
  fkp_surf_params fp;
  fkp_surf_params_default(&fp);
  CHECK(fp.size_count == 4u);
  CHECK(fp.sizes[3] == 27);
  CHECK(fp.hessian_weight == 0.9);
  REQUIRE(fkp_detect_surf(img, &fp, &kps) == FKP_OK);
  CHECK(fkp_keypoints_count(kps) == 9u);
  fkp_keypoint k;
  REQUIRE(fkp_keypoints_get(kps, 0, &k) == FKP_OK);
  CHECK(k.detector == FKP_DETECTOR_SURF);
  double values[64];
  int degenerate = -1;
  REQUIRE(fkp_surf_descriptor(img, &k, 1, values, &degenerate) == FKP_OK);
  CHECK(degenerate == 0);
  double sq = 0;
  for (double v : values) sq += v * v;
  CHECK(sq == doctest::Approx(1.0));

  fkp_image* annotated = nullptr;
  REQUIRE(fkp_annotate(img, kps, &annotated) == FKP_OK);
  CHECK(fkp_image_channels(annotated) == 3);
  fkp_image_destroy(annotated);
  fkp_keypoints_destroy(kps);

  fp.size_count = 2;
  CHECK(fkp_detect_surf(img, &fp, &kps) == FKP_ERR_INVALID_ARGUMENT);
  fp.size_count = 17;
  CHECK(fkp_detect_surf(img, &fp, &kps) == FKP_ERR_INVALID_ARGUMENT);

  fkp_image* tiny = nullptr;
  REQUIRE(fkp_image_create(8, 8, 1, nullptr, &tiny) == FKP_OK);
  fkp_surf_params_default(&fp);
  CHECK(fkp_detect_surf(tiny, &fp, &kps) == FKP_ERR_IMAGE_TOO_SMALL);
  CHECK(fkp_detect_sift(tiny, &sp, &kps) == FKP_ERR_IMAGE_TOO_SMALL);
  fkp_image_destroy(tiny);
  fkp_image_destroy(mask);
  fkp_image_destroy(img);
}

TEST_CASE("fixtures and masks") {
  fkp_fixture_spec spec;
  fkp_fixture_spec_default(&spec);
  fkp_image* img = nullptr;
  fkp_image* mask = nullptr;
  REQUIRE(fkp_fixture_create(&spec, &img, &mask) == FKP_OK);
  size_t area = 0;
  for (size_t i = 0; i < 256u * 256u; ++i) area += fkp_image_data(mask)[i] == 255;
  CHECK(area == 5025u);

  fkp_image* recomputed = nullptr;
  REQUIRE(fkp_image_band_mask(img, spec.band, &recomputed) == FKP_OK);
  CHECK(std::memcmp(fkp_image_data(mask), fkp_image_data(recomputed), 256 * 256) == 0);
  fkp_image_destroy(recomputed);
  fkp_image_destroy(mask);
  fkp_image_destroy(img);

  spec.radius = 500;
  CHECK(fkp_fixture_create(&spec, &img, &mask) == FKP_ERR_GEOMETRY);
  fkp_band bad{0.8, 0.2};
  fkp_image* any = disc_fixture();
  CHECK(fkp_image_band_mask(any, bad, &recomputed) == FKP_ERR_INVALID_ARGUMENT);
  fkp_image_destroy(any);
}

TEST_CASE("null arguments are rejected") {
  fkp_keypoints* kps = nullptr;
  CHECK(fkp_detect_sfa(nullptr, nullptr, &kps) == FKP_ERR_INVALID_ARGUMENT);
  CHECK(fkp_keypoints_count(nullptr) == 0u);
  CHECK(fkp_image_width(nullptr) == 0);
  CHECK(fkp_report_equal(nullptr, nullptr) == 0);
  fkp_image_destroy(nullptr);
  fkp_keypoints_destroy(nullptr);
  fkp_report_destroy(nullptr);
}

TEST_CASE("last error is per thread") {
  fkp_image* img = nullptr;
  CHECK(fkp_image_create(0, 0, 1, nullptr, &img) == FKP_ERR_INVALID_ARGUMENT);
  const std::string mine = fkp_last_error();
  CHECK_FALSE(mine.empty());
  std::string other = "unset";
  std::thread([&] { other = fkp_last_error(); }).join();
  CHECK(other.empty());
  CHECK(std::string(fkp_last_error()) == mine);
}
