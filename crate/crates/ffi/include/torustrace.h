#ifndef TORUSTRACE_H
#define TORUSTRACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum TtStatus {
  TT_STATUS_OK = 0,
  TT_STATUS_DOMAIN = 1,
  TT_STATUS_PRECONDITION = 2,
  TT_STATUS_CONVERGENCE = 3,
  TT_STATUS_RESOURCE = 4,
  TT_STATUS_CONFIG = 5,
  TT_STATUS_IO = 6,
  TT_STATUS_NULL_POINTER = 7,
  TT_STATUS_PANIC = 8,
} TtStatus;

/*
 Skinny/fat classification.
 */
typedef enum TtClass {
  TT_CLASS_SKINNY = 0,
  TT_CLASS_FAT = 1,
  TT_CLASS_BORDERLINE = 2,
} TtClass;

/*
 Opaque longitudinal conformal factor.
 */
typedef struct TtFactor TtFactor;

/*
 Opaque flat torus.
 */
typedef struct TtTorus TtTorus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty if none. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *tt_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *tt_version(void);

/*
 Unit-area torus with modulus `re + i im`.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_torus_new(double re, double im, struct TtTorus **out);

/*
 Rectangle torus `[-a, a] x [0, 2 pi]`.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_torus_rect(double a, struct TtTorus **out);

/*
 Hexagonal torus.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_torus_hex(struct TtTorus **out);

/*
 # Safety
 `t` must come from a `tt_torus_*` constructor and not be used afterwards.
 */
void tt_torus_free(struct TtTorus *t);

/*
 # Safety
 `t` must be a live handle; `re` and `im` valid pointers.
 */
enum TtStatus tt_torus_modulus(const struct TtTorus *t, double *re, double *im);

/*
 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_lambda1(const struct TtTorus *t, double *out);

/*
 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_classify(const struct TtTorus *t, enum TtClass *out);

/*
 Regularized trace of the flat torus.

 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_ztilde_flat(const struct TtTorus *t, double *out);

/*
 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_logdet_flat(const struct TtTorus *t, double *out);

/*
 Regularized trace of the round sphere of area `4 pi`.
 */
double tt_sphere_constant(void);

/*
 Green's function between `(x1, x2)` and `(y1, y2)`.

 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_greens(const struct TtTorus *t,
                        double x1,
                        double x2,
                        double y1,
                        double y2,
                        double *out);

/*
 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_robin_mass(const struct TtTorus *t, double *out);

/*
 # Safety
 `t` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_mass_trace_residual(const struct TtTorus *t, double *out);

/*
 Bubble factor on the rectangle `a`.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_factor_bubble(double a, struct TtFactor **out);

/*
 Smoothed bubble of the given width.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_factor_smoothed(double a, double width, struct TtFactor **out);

/*
 # Safety
 `f` must come from a `tt_factor_*` constructor and not be used afterwards.
 */
void tt_factor_free(struct TtFactor *f);

/*
 `e^{2 phi}` at `x1`.

 # Safety
 `f` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_factor_density(const struct TtFactor *f, double x1, double *out);

/*
 Change of the regularized trace under the factor; `n = 0` picks the
 default grid.

 # Safety
 `f` must be a live handle; `out` a valid pointer.
 */
enum TtStatus tt_functional(const struct TtFactor *f, size_t n, double *out);

/*
 Regularized trace of the conformally changed rectangle torus.

 # Safety
 `t` and `f` must be live handles; `out` a valid pointer.
 */
enum TtStatus tt_ztilde_conformal(const struct TtTorus *t,
                                  const struct TtFactor *f,
                                  size_t n,
                                  double *out);

/*
 Second variation along `sqrt(2) cos(k pi x1 / a)` (or `sin` when
 `use_sin` is nonzero) on the rectangle `a`.

 # Safety
 `out` must be a valid pointer.
 */
enum TtStatus tt_second_variation_mode(double a, uint32_t k, int32_t use_sin, double *out);

/*
 Calibrated Monte Carlo estimate of the trace and its standard error.

 # Safety
 `t` must be a live handle; `value` and `std_err` valid pointers.
 */
enum TtStatus tt_mc_trace_estimate(const struct TtTorus *t,
                                   double epsilon,
                                   size_t trials,
                                   uint64_t seed,
                                   double *value,
                                   double *std_err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUSTRACE_H */
