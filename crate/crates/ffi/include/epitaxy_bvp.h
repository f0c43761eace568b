#ifndef EPITAXY_BVP_H
#define EPITAXY_BVP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum EbvpKind {
  EBVP_KIND_DIRICHLET = 0,
  EBVP_KIND_NAVIER = 1,
} EbvpKind;

typedef enum EbvpStatus {
  EBVP_STATUS_OK = 0,
  EBVP_STATUS_NULL_POINTER = 1,
  /**
   * Caller input outside the documented domain.
   */
  EBVP_STATUS_PRECONDITION = 2,
  /**
   * The numerics failed (non-convergence, rejected solution, ...).
   */
  EBVP_STATUS_NUMERICAL = 3,
  EBVP_STATUS_INDEX_OUT_OF_RANGE = 4,
  EBVP_STATUS_PANIC = 5,
} EbvpStatus;

/**
 * Opaque list of shooting roots.
 */
typedef struct EbvpRootSet EbvpRootSet;

/**
 * Opaque sampled solution.
 */
typedef struct EbvpTrajectory EbvpTrajectory;

/**
 * Numerical settings for one solve. Obtain defaults from
 * [`ebvp_problem_default`] and override fields as needed.
 */
typedef struct EbvpProblem {
  double lambda;
  enum EbvpKind kind;
  double eps;
  double step_tol;
  double slope_min;
  double slope_max;
  size_t grid_n;
  size_t scan_n;
} EbvpProblem;

typedef struct EbvpValidation {
  double first_integral_resid;
  double representation_resid;
  double sign_violation;
  double boundary_resid;
} EbvpValidation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string. The pointer stays valid until the next library call on the
 * same thread.
 */
const char *ebvp_last_error(void);

struct EbvpProblem ebvp_problem_default(double lambda, enum EbvpKind kind);

/**
 * Integrate the shot with slope `a`. A diverged shot is still returned;
 * check [`ebvp_trajectory_diverged`].
 *
 * # Safety
 * `problem` must point to a valid `EbvpProblem` and `out` to writable
 * storage for one pointer.
 */
enum EbvpStatus ebvp_integrate(const struct EbvpProblem *problem,
                               double a,
                               struct EbvpTrajectory **out);

/**
 * Strip-constrained relaxation solve using the lower function that
 * matches `problem->kind`.
 *
 * # Safety
 * As for [`ebvp_integrate`].
 */
enum EbvpStatus ebvp_monotone_solve(const struct EbvpProblem *problem, struct EbvpTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a handle from this library.
 */
size_t ebvp_trajectory_len(const struct EbvpTrajectory *traj);

/**
 * # Safety
 * `traj` must be null or a handle from this library.
 */
bool ebvp_trajectory_diverged(const struct EbvpTrajectory *traj);

/**
 * Copy sample `index` into `t`, `u`, `du`.
 *
 * # Safety
 * `traj` must be a handle from this library; the out-pointers must be
 * writable.
 */
enum EbvpStatus ebvp_trajectory_get(const struct EbvpTrajectory *traj,
                                    size_t index,
                                    double *t,
                                    double *u,
                                    double *du);

/**
 * # Safety
 * `traj` must be null or a handle from this library not yet freed.
 */
void ebvp_trajectory_free(struct EbvpTrajectory *traj);

/**
 * # Safety
 * `traj` must be a handle from this library and `out` writable.
 */
enum EbvpStatus ebvp_validate(const struct EbvpTrajectory *traj, struct EbvpValidation *out);

/**
 * # Safety
 * As for [`ebvp_integrate`].
 */
enum EbvpStatus ebvp_find_roots(const struct EbvpProblem *problem, struct EbvpRootSet **out);

/**
 * # Safety
 * `roots` must be null or a handle from this library.
 */
size_t ebvp_root_set_len(const struct EbvpRootSet *roots);

/**
 * Slope and residual-slope sign (`-1`, `0`, `+1`) of root `index`.
 *
 * # Safety
 * `roots` must be a handle from this library; out-pointers writable.
 */
enum EbvpStatus ebvp_root_set_get(const struct EbvpRootSet *roots,
                                  size_t index,
                                  double *a,
                                  int8_t *sign);

/**
 * # Safety
 * `roots` must be null or a handle from this library not yet freed.
 */
void ebvp_root_set_free(struct EbvpRootSet *roots);

/**
 * Bisect `[lo, hi]` on root count down to width `tol`; `problem` supplies
 * the kind and numerical settings.
 *
 * # Safety
 * `problem` must be valid; `out_lo` and `out_hi` writable.
 */
enum EbvpStatus ebvp_locate_fold(const struct EbvpProblem *problem,
                                 double lo,
                                 double hi,
                                 double tol,
                                 double *out_lo,
                                 double *out_hi);

/**
 * All certificates for `kind` at `lambda`, as a JSON array string to be
 * released with [`ebvp_string_free`].
 *
 * # Safety
 * `out_json` must be writable.
 */
enum EbvpStatus ebvp_certify(double lambda, enum EbvpKind kind, char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void ebvp_string_free(char *s);

/**
 * # Safety
 * `c0` and `iterations` must be writable.
 */
enum EbvpStatus ebvp_fixed_point_c0(double lambda, double *c0, size_t *iterations);

double ebvp_universal_bound(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPITAXY_BVP_H */
