#ifndef KERR_SHADOW_H
#define KERR_SHADOW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  KS_OBSERVER_KIND_ZAMO = 0,
  KS_OBSERVER_KIND_STATIC = 1,
  KS_OBSERVER_KIND_CARTER = 2,
} KsObserverKind;

typedef enum {
  KS_STATUS_OK = 0,
  KS_STATUS_NULL_POINTER = 1,
  KS_STATUS_INVALID_SPIN = 2,
  KS_STATUS_SPIN_TOO_SMALL = 3,
  KS_STATUS_DOMAIN = 4,
  KS_STATUS_TIMELIKE_VIOLATION = 5,
  KS_STATUS_ERGOSPHERE_VIOLATION = 6,
  KS_STATUS_STEP_FAILURE = 7,
  KS_STATUS_DEGENERATE_RAY = 8,
  KS_STATUS_PROJECTION_POLE = 9,
  KS_STATUS_RENDER_FAILED = 10,
  KS_STATUS_CONFIG = 11,
  KS_STATUS_IO = 12,
  KS_STATUS_OUT_OF_RANGE = 13,
  KS_STATUS_PANIC = 14,
} KsStatus;

typedef enum {
  KS_TRAJECTORY_KIND_HORIZON_INFINITY = 0,
  KS_TRAJECTORY_KIND_HORIZON_HORIZON = 1,
  KS_TRAJECTORY_KIND_INFINITY_INFINITY = 2,
  KS_TRAJECTORY_KIND_SPHERICAL_CRITICAL = 3,
  KS_TRAJECTORY_KIND_FORBIDDEN = 4,
} KsTrajectoryKind;

typedef struct KsImage KsImage;

/**
 * Validated stationary observer in a given spacetime.
 */
typedef struct KsObserver KsObserver;

/**
 * Spacetime handle.
 */
typedef struct KsParams KsParams;

typedef struct KsShadowCurve KsShadowCurve;

/**
 * One sample of a shadow boundary. `case_tag` is 1 when `r_c ≤ r₀` and
 * 2 otherwise.
 */
typedef struct {
  double r_c;
  double alpha;
  double beta;
  double x;
  double y;
  uint8_t case_tag;
} KsShadowSample;

typedef struct {
  size_t pixels;
  size_t horizon;
  size_t escaped;
  size_t trapped;
  size_t degenerate;
  size_t failed;
} KsRenderStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ks_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *ks_status_name(KsStatus status);

/**
 * # Safety
 * `out` must be valid for writes.
 */
KsStatus ks_params_new(double a, KsParams **out);

/**
 * # Safety
 * `p` must come from `ks_params_new` and not have been freed; NULL is a no-op.
 */
void ks_params_free(KsParams *p);

/**
 * Outer horizon radius.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_params_horizon(const KsParams *p, double *out);

/**
 * Radii of the prograde and retrograde equatorial photon orbits.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_photon_ring_radii(const KsParams *p, double *r1, double *r2);

/**
 * `(λ, η)` of the spherical photon orbit at radius `r_c`.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_critical_point(const KsParams *p, double r_c, double *lambda, double *eta);

/**
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_classify(const KsParams *p,
                     double lambda,
                     double eta,
                     double r_start,
                     KsTrajectoryKind *kind,
                     bool *vortical);

/**
 * Admissible angular-velocity interval `(Ω₋, Ω₊)` at a position.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_omega_bounds(const KsParams *p, double r0, double theta0, double *lower, double *upper);

/**
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_observer_new(const KsParams *p,
                         double r0,
                         double theta0,
                         double omega,
                         double phi0,
                         KsObserver **out);

/**
 * Observer of a named family, with `φ₀ = 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_observer_named(const KsParams *p,
                           KsObserverKind kind,
                           double r0,
                           double theta0,
                           KsObserver **out);

/**
 * # Safety
 * `o` must come from `ks_observer_new`/`ks_observer_named`; NULL is a no-op.
 */
void ks_observer_free(KsObserver *o);

/**
 * The observer's angular velocity.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_observer_omega(const KsObserver *o, double *out);

/**
 * Time component `u₀` of the four-velocity.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_observer_u0(const KsObserver *o, double *out);

/**
 * Sample the shadow boundary with `n` radii per branch.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_shadow_curve_new(const KsObserver *o, size_t n, KsShadowCurve **out);

/**
 * # Safety
 * `c` must come from `ks_shadow_curve_new`; NULL is a no-op.
 */
void ks_shadow_curve_free(KsShadowCurve *c);

/**
 * Number of samples; 0 for NULL.
 *
 * # Safety
 * `c` must be NULL or valid.
 */
size_t ks_shadow_curve_len(const KsShadowCurve *c);

/**
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_shadow_curve_sample(const KsShadowCurve *c, size_t index, KsShadowSample *out);

/**
 * Ray-trace a `width × height` image of the plane window
 * `[-extent, extent]²` with the default scene and integrator settings.
 * `workers = 0` uses all cores; the result does not depend on it.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_render(const KsObserver *o,
                   size_t width,
                   size_t height,
                   double extent,
                   size_t workers,
                   bool flat,
                   KsImage **out);

/**
 * # Safety
 * `img` must come from `ks_render`; NULL is a no-op.
 */
void ks_image_free(KsImage *img);

/**
 * Width, height and a borrowed pointer to `3·width·height` RGB bytes,
 * row-major from the top-left. The pointer lives as long as the handle.
 *
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_image_pixels(const KsImage *img, size_t *width, size_t *height, const uint8_t **data);

/**
 * # Safety
 * Pointers must be valid.
 */
KsStatus ks_image_stats(const KsImage *img, KsRenderStats *out);

/**
 * Write the image as binary PPM to a UTF-8 path.
 *
 * # Safety
 * `img` must be valid and `path` a NUL-terminated string.
 */
KsStatus ks_image_write_ppm(const KsImage *img, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KERR_SHADOW_H */
