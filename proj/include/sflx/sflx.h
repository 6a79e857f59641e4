/*
 * Copyright 2026 The sflx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libsflx: black-box explanations for image classifiers from
 * spectrum-based fault localization over masked mutants.
 *
 * Conventions:
 *  - Every object is an opaque handle created by a create, load or generate
 *    function and released with the matching free (NULL is accepted).
 *  - Fallible calls return sflx_status; on failure sflx_last_error() holds a
 *    message for the calling thread until its next failing call.
 *  - Pointers returned by accessors are borrowed and stay valid while the
 *    owning handle lives. Strings returned through char** are owned by the
 *    caller and released with sflx_string_free.
 *  - Pixel indices address units: single pixels, or g x g cells when
 *    cell_size > 1, numbered row-major from the top-left.
 */

#ifndef SFLX_SFLX_H_
#define SFLX_SFLX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SFLX_API __declspec(dllexport)
#else
#define SFLX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sflx_status {
  SFLX_OK = 0,
  SFLX_ERR_INVALID_ARGUMENT = 1,
  SFLX_ERR_UNSUPPORTED_FORMAT = 2,
  SFLX_ERR_IO = 3,
  SFLX_ERR_CLASSIFIER_IO = 4,
  SFLX_ERR_INTERNAL = 5
} sflx_status;

typedef enum sflx_measure {
  SFLX_MEASURE_OCHIAI = 0,
  SFLX_MEASURE_TARANTULA = 1,
  SFLX_MEASURE_ZOLTAR = 2,
  SFLX_MEASURE_WONG_II = 3
} sflx_measure;

/* Which pixel state counts as "executed" when scoring (see README). */
typedef enum sflx_spectrum_role {
  SFLX_ROLE_MASKING = 0,
  SFLX_ROLE_PRESENCE = 1
} sflx_spectrum_role;

typedef enum sflx_search_mode {
  SFLX_SEARCH_AUTO = 0,
  SFLX_SEARCH_LINEAR = 1,
  SFLX_SEARCH_BINARY = 2
} sflx_search_mode;

typedef struct sflx_raster sflx_raster;
typedef struct sflx_classifier sflx_classifier;
typedef struct sflx_suite sflx_suite;
typedef struct sflx_ranking sflx_ranking;
typedef struct sflx_explanation sflx_explanation;
typedef struct sflx_best sflx_best;
typedef struct sflx_chimera sflx_chimera;

typedef struct sflx_options {
  double sigma0;          /* initial masked fraction, in (0,1) */
  int sigma0_random;      /* nonzero: draw sigma0 from (0,1) instead */
  double epsilon;         /* sigma step, in (0,1) */
  uint64_t m;             /* test suite size */
  uint64_t seed;
  uint32_t chunk;         /* mutants per sigma update; 1 = exact loop */
  uint32_t cell_size;     /* unit granularity g */
  sflx_spectrum_role role;
  sflx_search_mode search;
  int prune;
  uint8_t bg[3];          /* background color */
  uint32_t bg_channels;   /* 1 (broadcast) or 3 */
} sflx_options;

typedef struct sflx_deletion {
  uint64_t flip_index;
  double flip_fraction;
  int flipped;
  uint64_t queries_used;
} sflx_deletion;

typedef struct sflx_detection {
  double best_iou;
  int best_percent;
  double iou_at_truth_size;
} sflx_detection;

/* ---- library ---------------------------------------------------------- */

SFLX_API const char* sflx_version(void);
SFLX_API const char* sflx_last_error(void);
SFLX_API const char* sflx_status_name(sflx_status status);
SFLX_API void sflx_string_free(char* s);

/* Defaults: sigma0 1/5, epsilon 1/6, m 2000, seed 0, chunk 1, cell 1,
 * masking role, auto search, no pruning, black background. */
SFLX_API void sflx_options_default(sflx_options* options);

SFLX_API sflx_status sflx_measure_parse(const char* name, sflx_measure* out);
SFLX_API const char* sflx_measure_name(sflx_measure measure);
SFLX_API sflx_status sflx_measure_value(sflx_measure measure, uint64_t ep,
                                        uint64_t ef, uint64_t np, uint64_t nf,
                                        double* out);

/* ---- images ----------------------------------------------------------- */

SFLX_API sflx_status sflx_raster_create(uint32_t width, uint32_t height,
                                        uint32_t channels, const uint8_t* data,
                                        size_t length, sflx_raster** out);
/* Uniform random intensities in [1,255] from the seeded generator. */
SFLX_API sflx_status sflx_raster_synthetic(uint32_t width, uint32_t height,
                                           uint32_t channels, uint64_t seed,
                                           sflx_raster** out);
SFLX_API sflx_status sflx_raster_load(const char* path, sflx_raster** out);
SFLX_API sflx_status sflx_raster_save(const sflx_raster* raster,
                                      const char* path);
SFLX_API void sflx_raster_free(sflx_raster* raster);
SFLX_API void sflx_raster_shape(const sflx_raster* raster, uint32_t* width,
                                uint32_t* height, uint32_t* channels);
SFLX_API const uint8_t* sflx_raster_data(const sflx_raster* raster,
                                         size_t* length);
/* Pixel-level masking with the options' background color. */
SFLX_API sflx_status sflx_raster_apply_mask(const sflx_raster* raster,
                                            const uint32_t* masked,
                                            size_t count,
                                            const sflx_options* options,
                                            sflx_raster** out);
SFLX_API sflx_status sflx_raster_keep_only(const sflx_raster* raster,
                                           const uint32_t* keep, size_t count,
                                           const sflx_options* options,
                                           sflx_raster** out);

/* ---- classifiers ------------------------------------------------------ */

/* Spec strings:
 *   builtin:kofs:k=<k>:s=<i,j,..>[:target=..][:other=..][:bg=..]
 *   builtin:linear:t=<t>:(w=<w,..>|seed=<s>:size=<n>)[:pos=..][:neg=..]
 *   builtin:const:label=<l>
 *   builtin:patch:file=<png>[:mask=<png>][:frac=<f>][:target=..][:other=..]
 *   proc:<shell command>   (sflx-bridge NDJSON protocol)
 * `options` (may be NULL) supplies the default background. */
SFLX_API sflx_status sflx_classifier_create(const char* spec,
                                            const sflx_options* options,
                                            sflx_classifier** out);
/* Patch-keyed detector; `mask` may be NULL (whole patch). */
SFLX_API sflx_status sflx_classifier_create_patch(
    const sflx_raster* patch, const sflx_raster* mask, double min_fraction,
    const char* target, const char* other, const sflx_options* options,
    sflx_classifier** out);
SFLX_API void sflx_classifier_free(sflx_classifier* classifier);
SFLX_API sflx_status sflx_classifier_classify(sflx_classifier* classifier,
                                              const sflx_raster* image,
                                              char** label);

/* ---- test suite ------------------------------------------------------- */

SFLX_API sflx_status sflx_suite_generate(sflx_classifier* classifier,
                                         const sflx_raster* image,
                                         const sflx_options* options,
                                         sflx_suite** out);
SFLX_API void sflx_suite_free(sflx_suite* suite);
SFLX_API uint64_t sflx_suite_size(const sflx_suite* suite);
SFLX_API uint64_t sflx_suite_unit_count(const sflx_suite* suite);
SFLX_API const char* sflx_suite_original_label(const sflx_suite* suite);
SFLX_API void sflx_suite_balance(const sflx_suite* suite, uint64_t* same,
                                 uint64_t* different);
SFLX_API sflx_status sflx_suite_to_json(const sflx_suite* suite, char** json);
SFLX_API sflx_status sflx_suite_write_json(const sflx_suite* suite,
                                           const char* path);

/* ---- ranking ---------------------------------------------------------- */

SFLX_API sflx_status sflx_ranking_compute(const sflx_suite* suite,
                                          sflx_measure measure,
                                          const sflx_options* options,
                                          sflx_ranking** out);
SFLX_API void sflx_ranking_free(sflx_ranking* ranking);
SFLX_API uint64_t sflx_ranking_size(const sflx_ranking* ranking);
SFLX_API sflx_status sflx_ranking_entry(const sflx_ranking* ranking,
                                        uint64_t rank, uint32_t* pixel,
                                        double* value);
SFLX_API sflx_status sflx_ranking_write_csv(const sflx_ranking* ranking,
                                            const char* path);
SFLX_API sflx_status sflx_ranking_write_heatmap(const sflx_ranking* ranking,
                                                const char* path);

/* ---- explanations ----------------------------------------------------- */

SFLX_API sflx_status sflx_explanation_build(sflx_classifier* classifier,
                                            const sflx_ranking* ranking,
                                            const sflx_options* options,
                                            sflx_explanation** out);
SFLX_API sflx_status sflx_explanation_prune(sflx_classifier* classifier,
                                            const sflx_explanation* explanation,
                                            sflx_explanation** out);
SFLX_API void sflx_explanation_free(sflx_explanation* explanation);
SFLX_API const uint32_t* sflx_explanation_pixels(
    const sflx_explanation* explanation, size_t* count);
SFLX_API sflx_measure sflx_explanation_measure(
    const sflx_explanation* explanation);
SFLX_API const char* sflx_explanation_label(const sflx_explanation* explanation);
SFLX_API uint64_t sflx_explanation_queries(const sflx_explanation* explanation);
SFLX_API int sflx_explanation_pruned(const sflx_explanation* explanation);
SFLX_API double sflx_explanation_size_fraction(
    const sflx_explanation* explanation);
/* Re-classifies the kept-only image; *sufficient = 1 when the label holds. */
SFLX_API sflx_status sflx_explanation_verify(sflx_classifier* classifier,
                                             const sflx_explanation* explanation,
                                             int* sufficient);
SFLX_API sflx_status sflx_explanation_to_json(
    const sflx_explanation* explanation, char** json);
SFLX_API sflx_status sflx_explanation_write_json(
    const sflx_explanation* explanation, const char* path);
/* The kept-only image: explanation units at original intensity, rest bg. */
SFLX_API sflx_status sflx_explanation_write_overlay(
    const sflx_explanation* explanation, const char* path);

/* Explanation per requested measure on one suite, plus the smallest. */
SFLX_API sflx_status sflx_explain_best(sflx_classifier* classifier,
                                       const sflx_suite* suite,
                                       const sflx_measure* measures,
                                       size_t count,
                                       const sflx_options* options,
                                       sflx_best** out);
SFLX_API void sflx_best_free(sflx_best* best);
SFLX_API sflx_measure sflx_best_measure(const sflx_best* best);
SFLX_API const sflx_explanation* sflx_best_explanation(const sflx_best* best);
SFLX_API size_t sflx_best_count(const sflx_best* best);
SFLX_API const sflx_ranking* sflx_best_ranking_at(const sflx_best* best,
                                                  size_t index);
SFLX_API const sflx_explanation* sflx_best_explanation_at(const sflx_best* best,
                                                          size_t index);

/* ---- evaluation ------------------------------------------------------- */

SFLX_API sflx_status sflx_deletion_curve(sflx_classifier* classifier,
                                         const sflx_ranking* ranking,
                                         sflx_deletion* out);
SFLX_API double sflx_iou(const uint32_t* a, size_t a_count, const uint32_t* b,
                         size_t b_count);
/* `detected` and `detected_at_truth_size` (both optional) receive one flag
 * per threshold; `iou_by_percent` (optional) receives 100 values. */
SFLX_API sflx_status sflx_topk_detect(const sflx_ranking* ranking,
                                      const uint32_t* truth, size_t truth_count,
                                      const double* thresholds,
                                      size_t threshold_count,
                                      sflx_detection* out, int* detected,
                                      int* detected_at_truth_size,
                                      double* iou_by_percent);
/* Empirical CDF of explanation sizes. `xs` and `ys` need room for `count`
 * entries; `*points` receives the number of distinct sizes written. */
SFLX_API sflx_status sflx_size_cdf(const double* sizes, size_t count,
                                   double* xs, double* ys, size_t* points);
/* sufficient[kept_bitmask] for all 2^n subsets, n <= 12. Writes up to
 * `capacity` inclusion-minimal sets (bitmasks) and the total count. */
SFLX_API sflx_status sflx_brute_force_min(uint32_t n, const uint8_t* sufficient,
                                          int32_t* min_size,
                                          uint32_t* minimal_sets,
                                          size_t capacity, size_t* count);
/* Pastes `patch` (mask optional; nonzero = pasted) into each background at a
 * seeded offset and keeps composites labeled `target`. */
SFLX_API sflx_status sflx_chimera_generate(const sflx_raster* patch,
                                           const sflx_raster* mask,
                                           const sflx_raster* const* backgrounds,
                                           size_t background_count,
                                           uint64_t seed, const char* target,
                                           sflx_classifier* classifier,
                                           sflx_chimera** out);
SFLX_API void sflx_chimera_free(sflx_chimera* chimera);
SFLX_API size_t sflx_chimera_count(const sflx_chimera* chimera);
SFLX_API const sflx_raster* sflx_chimera_image(const sflx_chimera* chimera,
                                               size_t index);
SFLX_API const uint32_t* sflx_chimera_truth(const sflx_chimera* chimera,
                                            size_t index, size_t* count);
SFLX_API void sflx_chimera_placement(const sflx_chimera* chimera, size_t index,
                                     size_t* background_index, int32_t* x,
                                     int32_t* y);

/* Measure oracle and tiny brute-force checks; *passed = 1 when all pass.
 * `report` (optional) receives a JSON summary. */
SFLX_API sflx_status sflx_selftest(int* passed, char** report);

/* Atomic write (temp file + rename) of `length` bytes. */
SFLX_API sflx_status sflx_write_file(const char* path, const char* bytes,
                                     size_t length);

#ifdef __cplusplus
}
#endif

#endif /* SFLX_SFLX_H_ */
