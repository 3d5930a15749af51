#ifndef VSAL_H
#define VSAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum VsalStatus {
  VSAL_STATUS_OK = 0,
  VSAL_STATUS_NULL_POINTER = 1,
  VSAL_STATUS_INVALID_ARGUMENT = 2,
  VSAL_STATUS_DIMENSION_MISMATCH = 3,
  VSAL_STATUS_ALL_ZERO_MAP = 4,
  // Fusion or metric inputs leave the result undefined.
  VSAL_STATUS_UNDEFINED = 5,
  VSAL_STATUS_TOO_MANY_PATHS = 6,
  VSAL_STATUS_IO = 7,
  VSAL_STATUS_FORMAT = 8,
  // A Rust panic was caught at the boundary.
  VSAL_STATUS_INTERNAL = 9,
} VsalStatus;

// Opaque saliency map.
typedef struct VsalMap VsalMap;

// Opaque pairwise similarity matrix between predictors.
typedef struct VsalSimilarity VsalSimilarity;

// One gaze sample: time in seconds, position in pixels.
typedef struct VsalFixation {
  double t;
  double x;
  double y;
} VsalFixation;

// Integer pixel coordinate.
typedef struct VsalPixel {
  size_t x;
  size_t y;
} VsalPixel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL.
// The pointer stays valid until the next failing call on the same thread.
const char *vsal_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *vsal_version(void);

// Creates a map from `width * height` row-major values.
//
// # Safety
// `values` must point to `width * height` readable doubles; `out` must be writable.
enum VsalStatus vsal_map_new(size_t width,
                             size_t height,
                             const double *values,
                             struct VsalMap **out);

// Releases a map. NULL is ignored.
//
// # Safety
// `map` must come from this library and not be freed twice.
void vsal_map_free(struct VsalMap *map);

// Width in pixels, or 0 for NULL.
//
// # Safety
// `map` must be NULL or a live handle.
size_t vsal_map_width(const struct VsalMap *map);

// Height in pixels, or 0 for NULL.
//
// # Safety
// `map` must be NULL or a live handle.
size_t vsal_map_height(const struct VsalMap *map);

// Copies the row-major values into `out`, which must hold exactly `len` doubles.
//
// # Safety
// `map` must be live; `out` must point to `len` writable doubles.
enum VsalStatus vsal_map_copy_values(const struct VsalMap *map, double *out, size_t len);

// Reads a `.pfm` or `.pgm` map file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum VsalStatus vsal_map_read(const char *path, struct VsalMap **out);

// Writes a map as 32-bit PFM.
//
// # Safety
// `map` must be live; `path` must be a NUL-terminated string.
enum VsalStatus vsal_map_write_pfm(const struct VsalMap *map, const char *path);

// Gaze density at time `t` from `count` fixations.
//
// # Safety
// `fixations` must point to `count` records; `out` must be writable.
enum VsalStatus vsal_density_map(const struct VsalFixation *fixations,
                                 size_t count,
                                 double t,
                                 size_t width,
                                 size_t height,
                                 double sigma_d,
                                 double sigma_t,
                                 double cutoff,
                                 struct VsalMap **out);

// Builds an `m x m` similarity matrix from row-major entries.
//
// # Safety
// `entries` must point to `m * m` doubles; `out` must be writable.
enum VsalStatus vsal_similarity_new(const double *entries, size_t m, struct VsalSimilarity **out);

// Releases a similarity matrix. NULL is ignored.
//
// # Safety
// `sim` must come from this library and not be freed twice.
void vsal_similarity_free(struct VsalSimilarity *sim);

// Picks a predictor subset. Writes 0/1 flags into `mask_out` (length `m`).
// `greedy` non-zero selects the local-search solver.
//
// # Safety
// `sim` must be live; `mask_out` must point to `m` writable bytes.
enum VsalStatus vsal_select(const struct VsalSimilarity *sim,
                            double lambda_d,
                            double epsilon,
                            int32_t greedy,
                            uint8_t *mask_out,
                            size_t m);

// Objective value of a 0/1 mask of length `m`.
//
// # Safety
// `sim` must be live; `mask` must point to `m` bytes; `out` must be writable.
enum VsalStatus vsal_objective(const struct VsalSimilarity *sim,
                               const uint8_t *mask,
                               size_t m,
                               double lambda_d,
                               double epsilon,
                               double *out);

// Fuses a spatial and a temporal map. `lambda_out` may be NULL.
//
// # Safety
// Both maps must be live; `out` must be writable.
enum VsalStatus vsal_fuse(const struct VsalMap *spatial,
                          const struct VsalMap *temporal,
                          double omega,
                          struct VsalMap **out,
                          double *lambda_out);

// Area under the ROC curve, fixated pixels against all others.
//
// # Safety
// `map` must be live; `fixations` must point to `count` pixels; `out` must be writable.
enum VsalStatus vsal_metric_auc(const struct VsalMap *map,
                                const struct VsalPixel *fixations,
                                size_t count,
                                double *out);

// Shuffled AUC with negatives drawn from `pool`.
//
// # Safety
// `map` must be live; pointer arguments must cover their counts; `out` must be writable.
enum VsalStatus vsal_metric_sauc(const struct VsalMap *map,
                                 const struct VsalPixel *fixations,
                                 size_t count,
                                 const struct VsalPixel *pool,
                                 size_t pool_count,
                                 double *out);

// Normalized scanpath saliency.
//
// # Safety
// `map` must be live; `fixations` must point to `count` pixels; `out` must be writable.
enum VsalStatus vsal_metric_nss(const struct VsalMap *map,
                                const struct VsalPixel *fixations,
                                size_t count,
                                double *out);

// Histogram intersection against a ground-truth map.
//
// # Safety
// Both maps must be live; `out` must be writable.
enum VsalStatus vsal_metric_sim(const struct VsalMap *pred, const struct VsalMap *gt, double *out);

// Pearson correlation against a ground-truth map.
//
// # Safety
// Both maps must be live; `out` must be writable.
enum VsalStatus vsal_metric_cc(const struct VsalMap *pred, const struct VsalMap *gt, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VSAL_H */
