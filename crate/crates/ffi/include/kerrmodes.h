#ifndef KERRMODES_H
#define KERRMODES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KmStatus {
  KM_STATUS_OK = 0,
  KM_STATUS_NULL_POINTER = 1,
  KM_STATUS_INVALID_ARGUMENT = 2,
  KM_STATUS_NUMERICAL = 3,
  KM_STATUS_NO_CONVERGENCE = 4,
  KM_STATUS_BUFFER_TOO_SMALL = 5,
  KM_STATUS_PANIC = 6,
} KmStatus;

typedef enum KmModel {
  /**
   * chi1 = -scale * plasma_frequency^2 / (omega^2 + i damping omega)
   */
  KM_MODEL_DRUDE = 0,
  /**
   * chi1 = eta
   */
  KM_MODEL_CONSTANT = 1,
} KmModel;

/**
 * Opaque computed branch.
 */
typedef struct KmBranch KmBranch;

/**
 * Opaque layered medium.
 */
typedef struct KmGeometry KmGeometry;

typedef struct KmComplex {
  double re;
  double im;
} KmComplex;

/**
 * One layer. For Drude, `scale` <= 0 selects the default 2 pi; `eta` is
 * ignored. For Constant only `eta` and `chi3` are read.
 */
typedef struct KmLayer {
  enum KmModel model;
  double plasma_frequency;
  double damping;
  double scale;
  struct KmComplex eta;
  struct KmComplex chi3;
} KmLayer;

typedef struct KmRegion {
  double re_min;
  double re_max;
  double im_min;
  double im_max;
} KmRegion;

typedef struct KmBranchPoint {
  double epsilon;
  struct KmComplex omega;
  double residual_norm;
  size_t newton_iters;
  double pt_defect;
  double divergence_jump;
} KmBranchPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none.
 */
const char *km_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *km_version(void);

/**
 * Two half-spaces meeting at x = 0.
 *
 * # Safety
 * `left`, `right` and `out` must be valid pointers.
 */
enum KmStatus km_geometry_two_layer(const struct KmLayer *left,
                                    const struct KmLayer *right,
                                    struct KmGeometry **out);

/**
 * Core layer on (0, d) between two half-spaces.
 *
 * # Safety
 * All pointers must be valid.
 */
enum KmStatus km_geometry_sandwich(const struct KmLayer *left,
                                   const struct KmLayer *core,
                                   const struct KmLayer *right,
                                   double d,
                                   struct KmGeometry **out);

/**
 * # Safety
 * `g` must come from a km_geometry_* constructor or be null.
 */
void km_geometry_free(struct KmGeometry *g);

/**
 * Certified eigenvalues of a two-layer geometry in `region`. Writes up to
 * `cap` values to `out` and the number found to `count`; returns
 * BUFFER_TOO_SMALL (with `count` set) when `cap` is not enough.
 *
 * # Safety
 * `g`, `region` and `count` must be valid; `out` must hold `cap` values.
 */
enum KmStatus km_eigs2(double k,
                       const struct KmGeometry *g,
                       const struct KmRegion *region_,
                       struct KmComplex *out,
                       size_t cap,
                       size_t *count);

/**
 * Certified eigenvalues of a sandwich geometry; same buffer protocol as
 * km_eigs2.
 *
 * # Safety
 * As km_eigs2.
 */
enum KmStatus km_eigs3(double k,
                       const struct KmGeometry *g,
                       const struct KmRegion *region_,
                       struct KmComplex *out,
                       size_t cap,
                       size_t *count);

/**
 * First-order frequency shift nu at the two-layer eigenvalue omega0, by
 * exact integration (`nu_exact`) and by the trapezoid rule on the grid
 * (L, N) (`nu_grid`). Either output may be null.
 *
 * # Safety
 * `g` must be valid; non-null outputs must be writable.
 */
enum KmStatus km_nu(double k,
                    const struct KmGeometry *g,
                    struct KmComplex omega0,
                    double l,
                    size_t n,
                    struct KmComplex *nu_exact,
                    struct KmComplex *nu_grid);

/**
 * Continues the nonlinear branch from omega0 over `steps` geometrically
 * spaced eps in [eps_min, eps_max] on the grid (L, N). A branch that stops
 * early is still returned; check km_branch_truncated.
 *
 * # Safety
 * `g` and `out` must be valid.
 */
enum KmStatus km_bifurcate(double k,
                           const struct KmGeometry *g,
                           struct KmComplex omega0,
                           double l,
                           size_t n,
                           double eps_min,
                           double eps_max,
                           size_t steps,
                           struct KmBranch **out);

/**
 * Number of accepted points; 0 for a null handle.
 *
 * # Safety
 * `b` must be a branch handle or null.
 */
size_t km_branch_len(const struct KmBranch *b);

/**
 * 1 if continuation stopped before the end of the schedule.
 *
 * # Safety
 * `b` must be a branch handle or null.
 */
int32_t km_branch_truncated(const struct KmBranch *b);

/**
 * # Safety
 * `b` must be a branch handle and `out` writable.
 */
enum KmStatus km_branch_point(const struct KmBranch *b, size_t i, struct KmBranchPoint *out);

/**
 * # Safety
 * `b` must come from km_bifurcate or be null.
 */
void km_branch_free(struct KmBranch *b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KERRMODES_H */
