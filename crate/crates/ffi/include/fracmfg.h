#ifndef FRACMFG_H
#define FRACMFG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FmfgDirection {
  FMFG_DIRECTION_FORWARD = 0,
  FMFG_DIRECTION_BACKWARD = 1,
} FmfgDirection;

/**
 * Result codes.
 */
typedef enum FmfgStatus {
  FMFG_STATUS_OK = 0,
  FMFG_STATUS_NULL_POINTER = 1,
  FMFG_STATUS_INVALID_ARGUMENT = 2,
  FMFG_STATUS_SHAPE_MISMATCH = 3,
  FMFG_STATUS_NUMERICAL_FAILURE = 4,
  FMFG_STATUS_NEGATIVITY = 5,
  FMFG_STATUS_IO = 6,
  FMFG_STATUS_PANIC = 7,
} FmfgStatus;

typedef enum FmfgStencilKind {
  FMFG_STENCIL_KIND_RL_DERIVATIVE = 0,
  FMFG_STENCIL_KIND_RL_INTEGRAL = 1,
  FMFG_STENCIL_KIND_CAPUTO_DERIVATIVE = 2,
} FmfgStencilKind;

/**
 * Opaque time-by-space field, row-major `(n_time, n_cells)`.
 */
typedef struct FmfgField FmfgField;

/**
 * Opaque MFG problem.
 */
typedef struct FmfgMfgProblem FmfgMfgProblem;

/**
 * Opaque MFG solution.
 */
typedef struct FmfgMfgSolution FmfgMfgSolution;

/**
 * Opaque fractional stencil.
 */
typedef struct FmfgStencil FmfgStencil;

/**
 * Uniform grids: `[0, horizon]` with `n_steps` steps and the periodic
 * interval `[x_min, x_max)` with `n_cells` cells.
 */
typedef struct FmfgGrids {
  double horizon;
  size_t n_steps;
  double x_min;
  double x_max;
  size_t n_cells;
} FmfgGrids;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *fmfg_version(void);

/**
 * Copy the calling thread's last error message into `buf` (nul-terminated,
 * truncated to `len`). Returns the full message length, or 0 if none.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null with `len == 0`.
 */
size_t fmfg_last_error(char *buf, size_t len);

/**
 * `E_{alpha,gamma}(z)` for real `z`.
 *
 * # Safety
 * `out` must be a valid pointer to one `double`.
 */
enum FmfgStatus fmfg_mittag_leffler(double alpha, double gamma, double z, double *out);

/**
 * Build a stencil of order in `(0, 1]` on `n_nodes` nodes spaced `dt`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum FmfgStatus fmfg_stencil_new(double order,
                                 enum FmfgStencilKind kind,
                                 enum FmfgDirection direction,
                                 size_t n_nodes,
                                 double dt,
                                 struct FmfgStencil **out);

/**
 * Apply a stencil to `n` samples, writing `n` values to `out`.
 *
 * # Safety
 * `samples` and `out` must hold `n` doubles; `stencil` must come from
 * [`fmfg_stencil_new`].
 */
enum FmfgStatus fmfg_stencil_apply(const struct FmfgStencil *stencil,
                                   const double *samples,
                                   size_t n,
                                   double *out);

/**
 * # Safety
 * `stencil` must come from [`fmfg_stencil_new`] and not be used afterwards.
 */
void fmfg_stencil_free(struct FmfgStencil *stencil);

/**
 * Number of time nodes of a field.
 *
 * # Safety
 * `field` must be a live field handle or null (which gives 0).
 */
size_t fmfg_field_n_time(const struct FmfgField *field);

/**
 * Number of cells of a field.
 *
 * # Safety
 * `field` must be a live field handle or null (which gives 0).
 */
size_t fmfg_field_n_cells(const struct FmfgField *field);

/**
 * Copy all values (row-major, `n_time * n_cells`) into `out`.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum FmfgStatus fmfg_field_copy(const struct FmfgField *field, double *out, size_t len);

/**
 * # Safety
 * `field` must be a field handle and not be used afterwards.
 */
void fmfg_field_free(struct FmfgField *field);

/**
 * Fractional Fokker-Planck solve. `m0` has `n_cells` values, `drift` has
 * `(n_steps + 1) * n_cells` (row-major by time).
 *
 * # Safety
 * Buffers must have the stated lengths; `out` must be a valid handle slot.
 */
enum FmfgStatus fmfg_fp_solve(struct FmfgGrids grids_in,
                              double beta,
                              double nu,
                              const double *m0,
                              const double *drift,
                              struct FmfgField **out);

/**
 * Fractional HJB solve with the truncated quadratic Hamiltonian. `g` has
 * `n_cells` values, `source` `(n_steps + 1) * n_cells`. The value function
 * is returned in `value_out`, the feedback drift in `drift_out` (either may
 * be null if not wanted).
 *
 * # Safety
 * Buffers must have the stated lengths; non-null slots must be writable.
 */
enum FmfgStatus fmfg_hjb_solve(struct FmfgGrids grids_in,
                               double beta,
                               double nu,
                               double u_max,
                               const double *g,
                               const double *source,
                               struct FmfgField **value_out,
                               struct FmfgField **drift_out);

/**
 * The reference MFG problem on `n_cells` cells and `n_steps` steps
 * (beta 0.7, nu 0.05, kappa 0.5 on [-2, 2), T = 1).
 *
 * # Safety
 * `out` must be a valid handle slot.
 */
enum FmfgStatus fmfg_mfg_problem_desk(size_t n_cells, size_t n_steps, struct FmfgMfgProblem **out);

/**
 * Set the order `beta` in `(0, 1]`.
 *
 * # Safety
 * `problem` must be a live problem handle.
 */
enum FmfgStatus fmfg_mfg_problem_set_beta(struct FmfgMfgProblem *problem, double beta);

/**
 * Set coupling strength, damping, tolerance and iteration cap together.
 *
 * # Safety
 * `problem` must be a live problem handle.
 */
enum FmfgStatus fmfg_mfg_problem_set_iteration(struct FmfgMfgProblem *problem,
                                               double kappa,
                                               double damping,
                                               double tolerance,
                                               size_t max_iters);

/**
 * # Safety
 * `problem` must be a problem handle and not be used afterwards.
 */
void fmfg_mfg_problem_free(struct FmfgMfgProblem *problem);

/**
 * Run the damped Picard iteration. A run that stops at the iteration cap
 * still returns `Ok`; query [`fmfg_mfg_solution_converged`].
 *
 * # Safety
 * `problem` must be live; `out` a valid handle slot.
 */
enum FmfgStatus fmfg_mfg_solve(const struct FmfgMfgProblem *problem, struct FmfgMfgSolution **out);

/**
 * 1 if converged, 0 if not (or null).
 *
 * # Safety
 * `solution` must be live or null.
 */
int32_t fmfg_mfg_solution_converged(const struct FmfgMfgSolution *solution);

/**
 * Number of Picard iterations performed.
 *
 * # Safety
 * `solution` must be live or null.
 */
size_t fmfg_mfg_solution_iterations(const struct FmfgMfgSolution *solution);

/**
 * Fixed-point gap of iteration `iter` (1-based), NaN if out of range.
 *
 * # Safety
 * `solution` must be live or null.
 */
double fmfg_mfg_solution_gap(const struct FmfgMfgSolution *solution, size_t iter);

/**
 * New field handles holding the density and the value function.
 *
 * # Safety
 * `solution` must be live; non-null slots must be writable.
 */
enum FmfgStatus fmfg_mfg_solution_fields(const struct FmfgMfgSolution *solution,
                                         struct FmfgField **density_out,
                                         struct FmfgField **value_out);

/**
 * # Safety
 * `solution` must be a solution handle and not be used afterwards.
 */
void fmfg_mfg_solution_free(struct FmfgMfgSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACMFG_H */
