#ifndef KKGREEN_H
#define KKGREEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KkgMethod {
  KKG_METHOD_AUTO = 0,
  KKG_METHOD_BORN = 1,
  KKG_METHOD_DIRECT = 2,
} KkgMethod;

/**
 * Result codes.
 */
typedef enum KkgStatus {
  KKG_STATUS_OK = 0,
  KKG_STATUS_NULL_POINTER = 1,
  KKG_STATUS_INVALID_ARGUMENT = 2,
  KKG_STATUS_INVALID_MODEL = 3,
  KKG_STATUS_LOWER_HALF_PLANE = 4,
  KKG_STATUS_SINGULAR = 5,
  KKG_STATUS_NOT_CONVERGED = 6,
  KKG_STATUS_RESOLUTION_CAP = 7,
  KKG_STATUS_PARSE = 8,
  KKG_STATUS_VALIDATION = 9,
  KKG_STATUS_IO = 10,
  KKG_STATUS_CHECKS_FAILED = 11,
  KKG_STATUS_PANIC = 12,
} KkgStatus;

/**
 * Opaque Green tensor sampled on the collocation grid.
 */
typedef struct KkgGreenField KkgGreenField;

/**
 * Opaque permittivity model.
 */
typedef struct KkgModel KkgModel;

typedef struct KkgUnits {
  double c;
  double hbar;
  double eps0;
} KkgUnits;

/**
 * One Lorentz oscillator. `sign` is +1 for an absorbing and -1 for an
 * amplifying medium.
 */
typedef struct KkgOscillator {
  double omega_t;
  double omega_p;
  double gamma;
  int32_t sign;
} KkgOscillator;

typedef struct KkgComplex {
  double re;
  double im;
} KkgComplex;

/**
 * A 3x3 complex tensor, row-major.
 */
typedef struct KkgTensor {
  double re[3][3];
  double im[3][3];
} KkgTensor;

/**
 * Noise-current spectrum at one point and frequency.
 */
typedef struct KkgNoise {
  double eps_imag;
  double commutator_density;
  double symmetrized_density;
  int32_t gain;
  int32_t sign_coherent;
} KkgNoise;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *kkg_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *kkg_last_error(void);

struct KkgUnits kkg_units_si(void);

struct KkgUnits kkg_units_natural(void);

/**
 * Empty space.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KkgStatus kkg_model_vacuum(struct KkgModel **out);

/**
 * All of space filled with the sum of `n` oscillators.
 *
 * # Safety
 * `osc` must point to `n` oscillators and `out` must be valid.
 */
enum KkgStatus kkg_model_homogeneous(const struct KkgOscillator *osc,
                                     size_t n,
                                     struct KkgModel **out);

/**
 * A ball of the given oscillators in vacuum, with the interface smoothed
 * over `mollify`.
 *
 * # Safety
 * `osc` must point to `n` oscillators, `center` to three doubles and `out`
 * must be valid.
 */
enum KkgStatus kkg_model_ball(const struct KkgOscillator *osc,
                              size_t n,
                              const double *center,
                              double radius,
                              double mollify,
                              struct KkgModel **out);

/**
 * The model described by a scenario document (JSON text).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` must be valid.
 */
enum KkgStatus kkg_model_from_scenario(const char *json, struct KkgModel **out);

/**
 * # Safety
 * `model` must come from a `kkg_model_*` constructor or be NULL.
 */
void kkg_model_free(struct KkgModel *model);

/**
 * `ε(r, ω)` for `Im ω ≥ 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum KkgStatus kkg_model_eval(const struct KkgModel *model,
                              const double *r,
                              struct KkgComplex omega,
                              struct KkgComplex *out);

/**
 * Relative Kramers-Kronig residual at `r` on a log grid of `nodes`
 * frequencies spanning `[omega_min, omega_max]`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum KkgStatus kkg_kk_residual(const struct KkgModel *model,
                               const double *r,
                               double omega_min,
                               double omega_max,
                               size_t nodes,
                               double *out);

/**
 * Normalized contour integral of `ε − 1` around the rectangle
 * `[re_lo, re_hi] × [im_lo, im_hi]` in the upper half-plane.
 *
 * # Safety
 * Pointers must be valid.
 */
enum KkgStatus kkg_analyticity(const struct KkgModel *model,
                               const double *r,
                               double re_lo,
                               double re_hi,
                               double im_lo,
                               double im_hi,
                               size_t nodes,
                               double *out);

/**
 * Solve for `G(·, s, ω)` on an `n³` grid of cube edge `edge` centred at
 * `center`. The source is nudged off the nearest node when it sits on one.
 *
 * # Safety
 * Pointers must be valid.
 */
enum KkgStatus kkg_solve_g(const struct KkgModel *model,
                           const double *center,
                           double edge,
                           size_t n,
                           struct KkgComplex omega,
                           const double *source,
                           enum KkgMethod method,
                           struct KkgUnits units,
                           struct KkgGreenField **out);

/**
 * Number of grid nodes, 0 for NULL.
 *
 * # Safety
 * `field` must come from [`kkg_solve_g`] or be NULL.
 */
size_t kkg_green_field_len(const struct KkgGreenField *field);

/**
 * Source position actually used by the solve.
 *
 * # Safety
 * Pointers must be valid; `source_out` holds three doubles.
 */
enum KkgStatus kkg_green_field_source(const struct KkgGreenField *field, double *source_out);

/**
 * Position and tensor value at node `index`. Either output may be NULL.
 *
 * # Safety
 * Pointers must be valid; `point_out` holds three doubles.
 */
enum KkgStatus kkg_green_field_node(const struct KkgGreenField *field,
                                    size_t index,
                                    double *point_out,
                                    struct KkgTensor *tensor_out);

/**
 * # Safety
 * `field` must come from [`kkg_solve_g`] or be NULL.
 */
void kkg_green_field_free(struct KkgGreenField *field);

/**
 * Noise-current spectrum at `r` for real `omega > 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum KkgStatus kkg_noise_spectrum(const struct KkgModel *model,
                                  const double *r,
                                  double omega,
                                  struct KkgUnits units,
                                  struct KkgNoise *out);

/**
 * Run a scenario file and write JSON and CSV reports into
 * `out_dir/<scenario name>`. Returns `ChecksFailed` when the run completes
 * but some check fails; `passed` (optional) receives 1 or 0.
 *
 * # Safety
 * Strings must be NUL-terminated; `passed` may be NULL.
 */
enum KkgStatus kkg_run_scenario(const char *path, const char *out_dir, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KKGREEN_H */
