#include "fkp/fkp.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/image.hpp"
#include "core/sfa.hpp"
#include "core/sift.hpp"
#include "core/surf.hpp"

struct fkp_image {
  fkp::Image image;
};

struct fkp_keypoints {
  std::vector<fkp::KeyPoint> items;
};

struct fkp_report {
  fkp::bench::DetectionReport report;
};

namespace {

thread_local std::string last_error;

fkp_status status_of(fkp::ErrorCode code) {
  using fkp::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return FKP_ERR_INVALID_ARGUMENT;
    case ErrorCode::malformed_header: return FKP_ERR_MALFORMED_HEADER;
    case ErrorCode::truncated_payload: return FKP_ERR_TRUNCATED_PAYLOAD;
    case ErrorCode::unsupported_maxval: return FKP_ERR_UNSUPPORTED_MAXVAL;
    case ErrorCode::unsupported_format: return FKP_ERR_UNSUPPORTED_FORMAT;
    case ErrorCode::image_too_small: return FKP_ERR_IMAGE_TOO_SMALL;
    case ErrorCode::out_of_range: return FKP_ERR_OUT_OF_RANGE;
    case ErrorCode::overflow: return FKP_ERR_OVERFLOW;
    case ErrorCode::geometry_out_of_bounds: return FKP_ERR_GEOMETRY;
    case ErrorCode::io: return FKP_ERR_IO;
    case ErrorCode::parse: return FKP_ERR_PARSE;
  }
  return FKP_ERR_INTERNAL;
}

fkp_status fail(fkp_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
fkp_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return FKP_OK;
  } catch (const fkp::Error& e) {
    std::string msg = e.what();
    if (e.offset()) msg += " (byte offset " + std::to_string(*e.offset()) + ")";
    return fail(status_of(e.code()), std::move(msg));
  } catch (const std::bad_alloc&) {
    return fail(FKP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FKP_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fkp::Detector to_detector(fkp_detector d) {
  switch (d) {
    case FKP_DETECTOR_SFA: return fkp::Detector::sfa;
    case FKP_DETECTOR_SURF: return fkp::Detector::surf;
    case FKP_DETECTOR_SIFT: return fkp::Detector::sift;
  }
  throw fkp::Error(fkp::ErrorCode::invalid_argument, "unknown detector");
}

fkp_detector from_detector(fkp::Detector d) {
  switch (d) {
    case fkp::Detector::sfa: return FKP_DETECTOR_SFA;
    case fkp::Detector::surf: return FKP_DETECTOR_SURF;
    case fkp::Detector::sift: return FKP_DETECTOR_SIFT;
  }
  return FKP_DETECTOR_SFA;
}

fkp::Grid<std::uint8_t> mask_grid(const fkp::Image& img) {
  fkp::Grid<std::uint8_t> mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) mask(x, y) = img(x, y, 0) != 0 ? 1 : 0;
  }
  return mask;
}

fkp::Image mask_image(const fkp::Grid<std::uint8_t>& mask) {
  fkp::Image img(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) img(x, y) = mask(x, y) ? 255 : 0;
  }
  return img;
}

#define FKP_REQUIRE(cond, what)                                      \
  do {                                                               \
    if (!(cond)) return fail(FKP_ERR_INVALID_ARGUMENT, what);        \
  } while (0)

}  // namespace

extern "C" {

const char* fkp_version(void) { return "1.0.0"; }

const char* fkp_status_name(fkp_status status) {
  switch (status) {
    case FKP_OK: return "ok";
    case FKP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case FKP_ERR_MALFORMED_HEADER: return "malformed-header";
    case FKP_ERR_TRUNCATED_PAYLOAD: return "truncated-payload";
    case FKP_ERR_UNSUPPORTED_MAXVAL: return "unsupported-maxval";
    case FKP_ERR_UNSUPPORTED_FORMAT: return "unsupported-format";
    case FKP_ERR_IMAGE_TOO_SMALL: return "image-too-small";
    case FKP_ERR_OUT_OF_RANGE: return "out-of-range";
    case FKP_ERR_OVERFLOW: return "overflow";
    case FKP_ERR_GEOMETRY: return "geometry-out-of-bounds";
    case FKP_ERR_IO: return "io";
    case FKP_ERR_PARSE: return "parse";
    case FKP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fkp_last_error(void) { return last_error.c_str(); }

void fkp_free(void* buffer) { std::free(buffer); }

fkp_status fkp_image_create(int32_t width, int32_t height, int32_t channels,
                            const uint8_t* data, fkp_image** out) {
  FKP_REQUIRE(out, "out is null");
  return guarded([&] {
    fkp::Image img(width, height, channels);
    if (data) std::memcpy(img.data().data(), data, img.data().size());
    *out = new fkp_image{std::move(img)};
  });
}

fkp_status fkp_image_decode_pnm(const uint8_t* bytes, size_t length, fkp_image** out) {
  FKP_REQUIRE(out && (bytes || length == 0), "null argument");
  return guarded([&] {
    *out = new fkp_image{fkp::read_pnm(std::span<const std::uint8_t>(bytes, length))};
  });
}

fkp_status fkp_image_encode_pnm(const fkp_image* image, uint8_t** bytes, size_t* length) {
  FKP_REQUIRE(image && bytes && length, "null argument");
  return guarded([&] {
    const auto encoded = fkp::write_pnm(image->image);
    auto* buf = static_cast<uint8_t*>(std::malloc(encoded.size()));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, encoded.data(), encoded.size());
    *bytes = buf;
    *length = encoded.size();
  });
}

fkp_status fkp_image_load(const char* path, fkp_image** out) {
  FKP_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new fkp_image{fkp::load_pnm(path)}; });
}

fkp_status fkp_image_save(const fkp_image* image, const char* path) {
  FKP_REQUIRE(image && path, "null argument");
  return guarded([&] { fkp::save_pnm(image->image, path); });
}

int32_t fkp_image_width(const fkp_image* image) { return image ? image->image.width() : 0; }
int32_t fkp_image_height(const fkp_image* image) { return image ? image->image.height() : 0; }
int32_t fkp_image_channels(const fkp_image* image) { return image ? image->image.channels() : 0; }
const uint8_t* fkp_image_data(const fkp_image* image) {
  return image ? image->image.data().data() : nullptr;
}

fkp_status fkp_image_luminance(const fkp_image* image, int32_t x, int32_t y, double* out) {
  FKP_REQUIRE(image && out, "null argument");
  return guarded([&] { *out = fkp::luminance(image->image, x, y); });
}

fkp_status fkp_image_band_mask(const fkp_image* image, fkp_band band, fkp_image** out) {
  FKP_REQUIRE(image && out, "null argument");
  return guarded([&] {
    *out = new fkp_image{mask_image(fkp::band_mask(image->image, {band.low, band.high}))};
  });
}

void fkp_image_destroy(fkp_image* image) { delete image; }

void fkp_sfa_params_default(fkp_sfa_params* params) {
  if (!params) return;
  const fkp::sfa::SfaParams d;
  params->gamma = d.gamma;
  params->beta_pop = d.beta_pop;
  params->mu = d.mu;
  params->fireflies = d.fireflies;
  params->generations = d.generations;
  params->best_ratio = d.best_ratio;
  params->seed = d.seed;
  params->minimize = 0;
  params->band = {fkp::Band::bright().low, fkp::Band::bright().high};
  params->falloff = fkp::kDefaultFalloff;
}

void fkp_surf_params_default(fkp_surf_params* params) {
  if (!params) return;
  const fkp::surf::SurfConfig d;
  *params = fkp_surf_params{};
  params->size_count = d.sizes.size();
  for (std::size_t i = 0; i < d.sizes.size(); ++i) params->sizes[i] = d.sizes[i];
  params->hessian_weight = d.hessian_weight;
  params->relative_threshold = d.relative_threshold;
  params->absolute_threshold = 0.0;
  params->use_absolute_threshold = 0;
  params->upright = 1;
}

void fkp_sift_params_default(fkp_sift_params* params) {
  if (!params) return;
  const fkp::sift::SiftConfig d;
  params->base_sigma = d.base_sigma;
  params->scales_per_octave = d.scales_per_octave;
  params->octaves = d.octaves;
  params->contrast_threshold = d.contrast_threshold;
  params->edge_ratio = d.edge_ratio;
}

fkp_status fkp_detect_sfa(const fkp_image* image, const fkp_sfa_params* params,
                          fkp_keypoints** out) {
  FKP_REQUIRE(image && params && out, "null argument");
  return guarded([&] {
    fkp::sfa::SfaParams p;
    p.gamma = params->gamma;
    p.beta_pop = params->beta_pop;
    p.mu = params->mu;
    p.fireflies = params->fireflies;
    p.generations = params->generations;
    p.best_ratio = params->best_ratio;
    p.seed = params->seed;
    p.select_mode = params->minimize ? fkp::sfa::SelectMode::minimize
                                     : fkp::sfa::SelectMode::maximize;
    auto kps = fkp::sfa::run(image->image, {params->band.low, params->band.high}, p,
                             params->falloff);
    *out = new fkp_keypoints{std::move(kps)};
  });
}

namespace {

fkp::surf::SurfConfig surf_config(const fkp_surf_params& params) {
  if (params.size_count > FKP_SURF_MAX_SIZES) {
    throw fkp::Error(fkp::ErrorCode::invalid_argument, "too many filter sizes");
  }
  fkp::surf::SurfConfig cfg;
  cfg.sizes.assign(params.sizes, params.sizes + params.size_count);
  cfg.hessian_weight = params.hessian_weight;
  cfg.relative_threshold = params.relative_threshold;
  if (params.use_absolute_threshold) cfg.absolute_threshold = params.absolute_threshold;
  cfg.upright = params.upright != 0;
  return cfg;
}

}  // namespace

fkp_status fkp_detect_surf(const fkp_image* image, const fkp_surf_params* params,
                           fkp_keypoints** out) {
  FKP_REQUIRE(image && params && out, "null argument");
  return guarded([&] {
    auto result = fkp::surf::detect_surf(image->image, surf_config(*params));
    *out = new fkp_keypoints{std::move(result.keypoints)};
  });
}

fkp_status fkp_surf_descriptor(const fkp_image* image, const fkp_keypoint* keypoint, int upright,
                               double values[64], int* degenerate) {
  FKP_REQUIRE(image && keypoint && values, "null argument");
  return guarded([&] {
    fkp::KeyPoint kp;
    kp.x = keypoint->x;
    kp.y = keypoint->y;
    kp.scale = keypoint->scale;
    kp.score = keypoint->score;
    if (keypoint->has_orientation) kp.orientation = keypoint->orientation;
    const auto desc = fkp::surf::surf_descriptor(image->image, kp, upright != 0);
    std::copy(desc.values.begin(), desc.values.end(), values);
    if (degenerate) *degenerate = desc.degenerate ? 1 : 0;
  });
}

fkp_status fkp_detect_sift(const fkp_image* image, const fkp_sift_params* params,
                           fkp_keypoints** out) {
  FKP_REQUIRE(image && params && out, "null argument");
  return guarded([&] {
    fkp::sift::SiftConfig cfg;
    cfg.base_sigma = params->base_sigma;
    cfg.scales_per_octave = params->scales_per_octave;
    cfg.octaves = params->octaves;
    cfg.contrast_threshold = params->contrast_threshold;
    cfg.edge_ratio = params->edge_ratio;
    *out = new fkp_keypoints{fkp::sift::detect_sift(image->image, cfg)};
  });
}

size_t fkp_keypoints_count(const fkp_keypoints* keypoints) {
  return keypoints ? keypoints->items.size() : 0;
}

fkp_status fkp_keypoints_get(const fkp_keypoints* keypoints, size_t index, fkp_keypoint* out) {
  FKP_REQUIRE(keypoints && out, "null argument");
  if (index >= keypoints->items.size()) {
    return fail(FKP_ERR_OUT_OF_RANGE, "keypoint index out of range");
  }
  const auto& kp = keypoints->items[index];
  out->x = kp.x;
  out->y = kp.y;
  out->scale = kp.scale;
  out->score = kp.score;
  out->has_orientation = kp.orientation.has_value() ? 1 : 0;
  out->orientation = kp.orientation.value_or(0.0);
  out->detector = from_detector(kp.detector);
  return FKP_OK;
}

fkp_status fkp_keypoints_to_csv(const fkp_keypoints* keypoints, char** text) {
  FKP_REQUIRE(keypoints && text, "null argument");
  return guarded([&] { *text = copy_string(fkp::bench::keypoints_csv(keypoints->items)); });
}

void fkp_keypoints_destroy(fkp_keypoints* keypoints) { delete keypoints; }

void fkp_fixture_spec_default(fkp_fixture_spec* spec) {
  if (!spec) return;
  const fkp::bench::FixtureSpec d;
  spec->kind = static_cast<fkp_fixture_kind>(d.kind);
  spec->width = d.width;
  spec->height = d.height;
  spec->foreground = d.foreground;
  spec->background = d.background;
  spec->center_x = d.center_x;
  spec->center_y = d.center_y;
  spec->radius = d.radius;
  spec->square = d.square;
  spec->rows = d.rows;
  spec->cols = d.cols;
  spec->sigma = d.sigma;
  spec->edge_x = d.edge_x;
  spec->band = {d.band.low, d.band.high};
}

fkp_status fkp_fixture_create(const fkp_fixture_spec* spec, fkp_image** image, fkp_image** mask) {
  FKP_REQUIRE(spec && image, "null argument");
  return guarded([&] {
    if (spec->kind < FKP_FIXTURE_DISC || spec->kind > FKP_FIXTURE_CONSTANT) {
      throw fkp::Error(fkp::ErrorCode::invalid_argument, "unknown fixture kind");
    }
    fkp::bench::FixtureSpec s;
    s.kind = static_cast<fkp::bench::FixtureKind>(spec->kind);
    s.width = spec->width;
    s.height = spec->height;
    s.foreground = spec->foreground;
    s.background = spec->background;
    s.center_x = spec->center_x;
    s.center_y = spec->center_y;
    s.radius = spec->radius;
    s.square = spec->square;
    s.rows = spec->rows;
    s.cols = spec->cols;
    s.sigma = spec->sigma;
    s.edge_x = spec->edge_x;
    s.band = {spec->band.low, spec->band.high};
    auto fx = fkp::bench::make_fixture(s);
    auto img = std::make_unique<fkp_image>(fkp_image{std::move(fx.image)});
    if (mask) *mask = new fkp_image{mask_image(fx.mask)};
    *image = img.release();
  });
}

fkp_status fkp_annotate(const fkp_image* image, const fkp_keypoints* keypoints, fkp_image** out) {
  FKP_REQUIRE(image && keypoints && out, "null argument");
  return guarded(
      [&] { *out = new fkp_image{fkp::bench::annotate(image->image, keypoints->items)}; });
}

fkp_status fkp_report_compute(const fkp_image* mask, const fkp_keypoints* keypoints,
                              double elapsed_ms, fkp_detector detector,
                              const char* parameters_json, fkp_report** out) {
  FKP_REQUIRE(mask && keypoints && out, "null argument");
  return guarded([&] {
    auto params = nlohmann::ordered_json::object();
    if (parameters_json) {
      try {
        params = nlohmann::ordered_json::parse(parameters_json);
      } catch (const nlohmann::json::exception& e) {
        throw fkp::Error(fkp::ErrorCode::parse, std::string("parameters JSON: ") + e.what());
      }
      if (!params.is_object()) {
        throw fkp::Error(fkp::ErrorCode::parse, "parameters JSON must be an object");
      }
    }
    auto report = fkp::bench::compute_report(mask_grid(mask->image), keypoints->items,
                                             elapsed_ms, to_detector(detector), std::move(params));
    *out = new fkp_report{std::move(report)};
  });
}

fkp_status fkp_report_metrics_get(const fkp_report* report, fkp_report_metrics* out) {
  FKP_REQUIRE(report && out, "null argument");
  const auto& r = report->report;
  *out = {r.keypoint_count, r.elapsed_ms, r.precision, r.recall, r.spread, r.mask_components};
  return FKP_OK;
}

fkp_status fkp_report_to_json(const fkp_report* report, char** text) {
  FKP_REQUIRE(report && text, "null argument");
  return guarded([&] { *text = copy_string(fkp::bench::to_json(report->report)); });
}

fkp_status fkp_report_from_json(const char* text, fkp_report** out) {
  FKP_REQUIRE(text && out, "null argument");
  return guarded([&] { *out = new fkp_report{fkp::bench::report_from_json(text)}; });
}

int fkp_report_equal(const fkp_report* a, const fkp_report* b) {
  if (!a || !b) return 0;
  return a->report == b->report ? 1 : 0;
}

void fkp_report_destroy(fkp_report* report) { delete report; }

}  // extern "C"
