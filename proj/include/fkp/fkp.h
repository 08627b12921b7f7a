/*
 * fkp: firefly key-point search and classic box-filter / DoG baselines.
 *
 * Plain C interface over opaque handles. Every fallible call returns an
 * fkp_status; on failure fkp_last_error() holds a message for the calling
 * thread. Objects returned through out-parameters are owned by the caller and
 * released with the matching *_destroy function; byte and string buffers are
 * released with fkp_free.
 */
#ifndef FKP_FKP_H
#define FKP_FKP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FKP_BUILDING_LIBRARY)
#    define FKP_API __declspec(dllexport)
#  else
#    define FKP_API __declspec(dllimport)
#  endif
#else
#  define FKP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fkp_status {
  FKP_OK = 0,
  FKP_ERR_INVALID_ARGUMENT = 1,
  FKP_ERR_MALFORMED_HEADER = 2,
  FKP_ERR_TRUNCATED_PAYLOAD = 3,
  FKP_ERR_UNSUPPORTED_MAXVAL = 4,
  FKP_ERR_UNSUPPORTED_FORMAT = 5,
  FKP_ERR_IMAGE_TOO_SMALL = 6,
  FKP_ERR_OUT_OF_RANGE = 7,
  FKP_ERR_OVERFLOW = 8,
  FKP_ERR_GEOMETRY = 9,
  FKP_ERR_IO = 10,
  FKP_ERR_PARSE = 11,
  FKP_ERR_INTERNAL = 12
} fkp_status;

typedef enum fkp_detector { FKP_DETECTOR_SFA = 0, FKP_DETECTOR_SURF = 1, FKP_DETECTOR_SIFT = 2 } fkp_detector;

typedef enum fkp_fixture_kind {
  FKP_FIXTURE_DISC = 0,
  FKP_FIXTURE_CHECKERBOARD = 1,
  FKP_FIXTURE_BLOB_GRID = 2,
  FKP_FIXTURE_STEP_EDGE = 3,
  FKP_FIXTURE_CONSTANT = 4
} fkp_fixture_kind;

typedef struct fkp_image fkp_image;
typedef struct fkp_keypoints fkp_keypoints;
typedef struct fkp_report fkp_report;

typedef struct fkp_keypoint {
  double x;
  double y;
  double scale;
  double score;
  double orientation; /* radians, valid when has_orientation != 0 */
  int has_orientation;
  fkp_detector detector;
} fkp_keypoint;

typedef struct fkp_band {
  double low;
  double high;
} fkp_band;

typedef struct fkp_sfa_params {
  double gamma;
  double beta_pop;
  double mu;
  int32_t fireflies;
  int32_t generations;
  double best_ratio;
  uint64_t seed;
  int minimize; /* 0: keep highest fitness, 1: keep lowest */
  fkp_band band;
  double falloff;
} fkp_sfa_params;

#define FKP_SURF_MAX_SIZES 16

typedef struct fkp_surf_params {
  int32_t sizes[FKP_SURF_MAX_SIZES];
  size_t size_count;
  double hessian_weight;
  double relative_threshold;
  double absolute_threshold;
  int use_absolute_threshold;
  int upright;
} fkp_surf_params;

typedef struct fkp_sift_params {
  double base_sigma;
  int32_t scales_per_octave;
  int32_t octaves; /* 0 = derived from the image size */
  double contrast_threshold;
  double edge_ratio;
} fkp_sift_params;

typedef struct fkp_fixture_spec {
  fkp_fixture_kind kind;
  int32_t width;
  int32_t height;
  uint8_t foreground;
  uint8_t background;
  double center_x; /* negative: image centre */
  double center_y;
  double radius;
  int32_t square;
  int32_t rows;
  int32_t cols;
  double sigma;
  int32_t edge_x; /* negative: image centre */
  fkp_band band;
} fkp_fixture_spec;

typedef struct fkp_report_metrics {
  size_t keypoint_count;
  double elapsed_ms;
  double precision;
  double recall;
  double spread;
  size_t mask_components;
} fkp_report_metrics;

FKP_API const char* fkp_version(void);
FKP_API const char* fkp_status_name(fkp_status status);
FKP_API const char* fkp_last_error(void);
FKP_API void fkp_free(void* buffer);

/* Images */
FKP_API fkp_status fkp_image_create(int32_t width, int32_t height, int32_t channels,
                                    const uint8_t* data, fkp_image** out);
FKP_API fkp_status fkp_image_decode_pnm(const uint8_t* bytes, size_t length, fkp_image** out);
FKP_API fkp_status fkp_image_encode_pnm(const fkp_image* image, uint8_t** bytes, size_t* length);
FKP_API fkp_status fkp_image_load(const char* path, fkp_image** out);
FKP_API fkp_status fkp_image_save(const fkp_image* image, const char* path);
FKP_API int32_t fkp_image_width(const fkp_image* image);
FKP_API int32_t fkp_image_height(const fkp_image* image);
FKP_API int32_t fkp_image_channels(const fkp_image* image);
FKP_API const uint8_t* fkp_image_data(const fkp_image* image);
FKP_API fkp_status fkp_image_luminance(const fkp_image* image, int32_t x, int32_t y, double* out);
/* Binary image (0/255) of pixels whose luminance lies in the band. */
FKP_API fkp_status fkp_image_band_mask(const fkp_image* image, fkp_band band, fkp_image** out);
FKP_API void fkp_image_destroy(fkp_image* image);

/* Detectors */
FKP_API void fkp_sfa_params_default(fkp_sfa_params* params);
FKP_API void fkp_surf_params_default(fkp_surf_params* params);
FKP_API void fkp_sift_params_default(fkp_sift_params* params);

FKP_API fkp_status fkp_detect_sfa(const fkp_image* image, const fkp_sfa_params* params,
                                  fkp_keypoints** out);
FKP_API fkp_status fkp_detect_surf(const fkp_image* image, const fkp_surf_params* params,
                                   fkp_keypoints** out);
FKP_API fkp_status fkp_detect_sift(const fkp_image* image, const fkp_sift_params* params,
                                   fkp_keypoints** out);

/* 64-element L2-normalised descriptor; *degenerate set for constant windows. */
FKP_API fkp_status fkp_surf_descriptor(const fkp_image* image, const fkp_keypoint* keypoint,
                                       int upright, double values[64], int* degenerate);

/* Keypoint lists */
FKP_API size_t fkp_keypoints_count(const fkp_keypoints* keypoints);
FKP_API fkp_status fkp_keypoints_get(const fkp_keypoints* keypoints, size_t index,
                                     fkp_keypoint* out);
/* CSV text "x,y,scale,score,detector", LF line endings. */
FKP_API fkp_status fkp_keypoints_to_csv(const fkp_keypoints* keypoints, char** text);
FKP_API void fkp_keypoints_destroy(fkp_keypoints* keypoints);

/* Harness */
FKP_API void fkp_fixture_spec_default(fkp_fixture_spec* spec);
/* Gray fixture image and its 0/255 ground-truth mask (pixels inside spec->band). */
FKP_API fkp_status fkp_fixture_create(const fkp_fixture_spec* spec, fkp_image** image,
                                      fkp_image** mask);
FKP_API fkp_status fkp_annotate(const fkp_image* image, const fkp_keypoints* keypoints,
                                fkp_image** out);

/* mask: any image, nonzero first channel = target pixel. parameters_json: a
 * JSON object echoed into the report, or NULL. */
FKP_API fkp_status fkp_report_compute(const fkp_image* mask, const fkp_keypoints* keypoints,
                                      double elapsed_ms, fkp_detector detector,
                                      const char* parameters_json, fkp_report** out);
FKP_API fkp_status fkp_report_metrics_get(const fkp_report* report, fkp_report_metrics* out);
FKP_API fkp_status fkp_report_to_json(const fkp_report* report, char** text);
FKP_API fkp_status fkp_report_from_json(const char* text, fkp_report** out);
FKP_API int fkp_report_equal(const fkp_report* a, const fkp_report* b);
FKP_API void fkp_report_destroy(fkp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* FKP_FKP_H */
