#ifndef SPIRALGRAM_H
#define SPIRALGRAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_INPUT = 2,
  /**
   * The coordinate map hit a vanishing denominator.
   */
  SG_STATUS_SINGULAR = 3,
  SG_STATUS_NOT_K_NICE = 4,
  SG_STATUS_DEGENERATE = 5,
  SG_STATUS_NON_AFFINE = 6,
  SG_STATUS_BUFFER_TOO_SMALL = 7,
  SG_STATUS_OUT_OF_RANGE = 8,
  SG_STATUS_PANIC = 99,
} SgStatus;

typedef enum SgInterval {
  SG_INTERVAL_I = 0,
  SG_INTERVAL_J = 1,
  SG_INTERVAL_K = 2,
  SG_INTERVAL_BOUNDARY = 3,
  SG_INTERVAL_MIXED = 4,
} SgInterval;

typedef enum SgSpiralType {
  SG_SPIRAL_TYPE_NONE = 0,
  SG_SPIRAL_TYPE_ALPHA = 1,
  SG_SPIRAL_TYPE_BETA = 2,
} SgSpiralType;

/**
 * Corner invariants of a twisted polygon.
 */
typedef struct SgInvariants SgInvariants;

/**
 * A twisted polygon: one period of vertices plus the monodromy.
 */
typedef struct SgPolygon SgPolygon;

/**
 * An orbit of the coordinate map.
 */
typedef struct SgTrajectory SgTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sg_version(void);

/**
 * Message for the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next `sg_*` call on the same thread.
 */
const char *sg_last_error(void);

/**
 * Builds corner invariants from `len` values `x0, x1, ...`; `len` must be even and at least 4.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` to a writable handle slot.
 */
enum SgStatus sg_invariants_new(const double *values, size_t len, struct SgInvariants **out);

/**
 * Draws corner invariants of `n` vertices in a square named by two letters (`"KJ"`, `"IJ"`, ...).
 *
 * # Safety
 * `square` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum SgStatus sg_invariants_sample(const char *square,
                                   size_t n,
                                   uint64_t seed,
                                   struct SgInvariants **out);

/**
 * # Safety
 * `inv` must be NULL or a handle from this library that has not been freed.
 */
void sg_invariants_free(struct SgInvariants *inv);

/**
 * Number of entries (twice the number of vertices), or 0 for NULL.
 *
 * # Safety
 * `inv` must be NULL or a live handle.
 */
size_t sg_invariants_len(const struct SgInvariants *inv);

/**
 * Copies the entries into `out`, which holds `cap` doubles.
 *
 * # Safety
 * `inv` must be a live handle and `out` must point to `cap` writable doubles.
 */
enum SgStatus sg_invariants_values(const struct SgInvariants *inv, double *out, size_t cap);

/**
 * Writes `F1..F4` into `out[0..4]`. Infinite quantities are `INFINITY`, undefined ones `NAN`.
 *
 * # Safety
 * `inv` must be a live handle and `out` must point to 4 writable doubles.
 */
enum SgStatus sg_invariants_conserved(const struct SgInvariants *inv, double *out);

/**
 * Interval occupied by the even and by the odd entries.
 *
 * # Safety
 * `inv` must be a live handle; `even` and `odd` must be writable.
 */
enum SgStatus sg_invariants_grid(const struct SgInvariants *inv,
                                 enum SgInterval *even,
                                 enum SgInterval *odd);

/**
 * One step of the coordinate map (`inverse = false`) or its inverse.
 *
 * # Safety
 * `inv` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_t3_step(const struct SgInvariants *inv, bool inverse, struct SgInvariants **out);

/**
 * Spiral verdict for invariants over the window `start ..= start + horizon`.
 *
 * # Safety
 * `inv` must be a live handle and `out` writable.
 */
enum SgStatus sg_invariants_spiral(const struct SgInvariants *inv,
                                   size_t k,
                                   int64_t start,
                                   size_t horizon,
                                   enum SgSpiralType *out);

/**
 * Builds a polygon from `n` affine vertices `xy = [x0, y0, x1, y1, ...]` and a
 * row-major 3x3 monodromy (NULL means the identity, i.e. a closed polygon).
 *
 * # Safety
 * `xy` must point to `2 n` doubles, `monodromy` to 9 doubles or be NULL, and
 * `out` must be a writable handle slot.
 */
enum SgStatus sg_polygon_new(const double *xy,
                             size_t n,
                             const double *monodromy,
                             struct SgPolygon **out);

/**
 * Reconstructs a polygon from invariants. With `conditioned` the seed frame is
 * chosen for float accuracy; otherwise the unit square seeds `P0..P3`.
 *
 * # Safety
 * `inv` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_polygon_reconstruct(const struct SgInvariants *inv,
                                     bool conditioned,
                                     struct SgPolygon **out);

/**
 * # Safety
 * `p` must be NULL or a live handle.
 */
void sg_polygon_free(struct SgPolygon *p);

/**
 * Number of vertices per period, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t sg_polygon_n(const struct SgPolygon *p);

/**
 * Homogeneous coordinates of vertex `i` (any integer index) into `out[0..3]`.
 *
 * # Safety
 * `p` must be a live handle and `out` must point to 3 writable doubles.
 */
enum SgStatus sg_polygon_vertex(const struct SgPolygon *p, int64_t i, double *out);

/**
 * Row-major monodromy into `out[0..9]`.
 *
 * # Safety
 * `p` must be a live handle and `out` must point to 9 writable doubles.
 */
enum SgStatus sg_polygon_monodromy(const struct SgPolygon *p, double *out);

/**
 * Corner invariants of the polygon.
 *
 * # Safety
 * `p` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_polygon_invariants(const struct SgPolygon *p, struct SgInvariants **out);

/**
 * Image under `T_k` (forward-shift labeling) or, with `inverse`, its preimage.
 *
 * # Safety
 * `p` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_polygon_tk(const struct SgPolygon *p,
                            size_t k,
                            bool inverse,
                            struct SgPolygon **out);

/**
 * Spiral verdict for the polygon as given over `start ..= start + horizon`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum SgStatus sg_polygon_spiral(const struct SgPolygon *p,
                                size_t k,
                                int64_t start,
                                size_t horizon,
                                enum SgSpiralType *out);

/**
 * Iterates the coordinate map `steps` times. A singular point ends the orbit
 * early; that is reported by [`sg_trajectory_completed`], not as an error.
 *
 * # Safety
 * `inv` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_orbit(const struct SgInvariants *inv,
                       size_t steps,
                       bool backward,
                       struct SgTrajectory **out);

/**
 * # Safety
 * `t` must be NULL or a live handle.
 */
void sg_trajectory_free(struct SgTrajectory *t);

/**
 * Number of stored iterates, including the start; 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t sg_trajectory_len(const struct SgTrajectory *t);

/**
 * # Safety
 * `t` must be NULL or a live handle.
 */
bool sg_trajectory_completed(const struct SgTrajectory *t);

/**
 * Copy of iterate `m`.
 *
 * # Safety
 * `t` must be a live handle and `out` a writable handle slot.
 */
enum SgStatus sg_trajectory_step(const struct SgTrajectory *t, size_t m, struct SgInvariants **out);

/**
 * Largest relative drift of each conserved quantity into `out[0..4]`.
 *
 * # Safety
 * `t` must be a live handle and `out` must point to 4 writable doubles.
 */
enum SgStatus sg_trajectory_drift(const struct SgTrajectory *t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPIRALGRAM_H */
