/* bouss2d C API: 2D incompressible Boussinesq solver (GSAV-BDF(k) consistent splitting). */

#ifndef BOUSS2D_H
#define BOUSS2D_H

/* Generated by cbindgen from bouss2d-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible call.
 */
typedef enum Bouss2dStatus {
  BOUSS2D_STATUS_OK = 0,
  BOUSS2D_STATUS_NULL_POINTER = 1,
  BOUSS2D_STATUS_INVALID_ARGUMENT = 2,
  BOUSS2D_STATUS_SOLVER_FAILURE = 3,
  BOUSS2D_STATUS_DIVERGED = 4,
} Bouss2dStatus;

/*
 Built-in problem selection.
 */
typedef enum Bouss2dProblem {
  BOUSS2D_PROBLEM_MANUFACTURED = 0,
  BOUSS2D_PROBLEM_MARSIGLI = 1,
  BOUSS2D_PROBLEM_SHEAR_LAYER = 2,
} Bouss2dProblem;

/*
 Spatial stabilization of the velocity equation.
 */
typedef enum Bouss2dStab {
  BOUSS2D_STAB_NONE = 0,
  BOUSS2D_STAB_SA = 1,
  BOUSS2D_STAB_SB = 2,
} Bouss2dStab;

/*
 Opaque solver handle.
 */
typedef struct Bouss2dSolver Bouss2dSolver;

/*
 Run configuration. `nx`/`ny` count grid nodes including the boundary;
 `k` and `l` are the (real) extrapolation widths.
 */
typedef struct Bouss2dConfig {
  uint32_t nx;
  uint32_t ny;
  double tau;
  double k;
  double l;
  enum Bouss2dStab stab;
  double cs;
} Bouss2dConfig;

/*
 Per-step diagnostics mirrored from the solver.
 */
typedef struct Bouss2dReport {
  uint64_t step;
  double t;
  double energy;
  double r;
  double xi;
  double eta;
  double div_norm;
} Bouss2dReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Create a solver for one of the built-in problems and run its bootstrap.
 On success `*out` owns the new solver.

 # Safety
 `config` must point to a valid [`Bouss2dConfig`] and `out` to writable
 pointer storage; both only need to live for this call.
 */
enum Bouss2dStatus bouss2d_solver_new(enum Bouss2dProblem problem,
                                      const struct Bouss2dConfig *config,
                                      struct Bouss2dSolver **out);

/*
 Advance one time step. `report` (optional) receives the step
 diagnostics. Returns `Diverged` when the energy blow-up guard trips and
 `SolverFailure` when an inner solve does not converge; the solver then
 refuses further steps.

 # Safety
 `solver` must be a live handle from [`bouss2d_solver_new`]; `report` must
 be null or valid for writes.
 */
enum Bouss2dStatus bouss2d_solver_step(struct Bouss2dSolver *solver, struct Bouss2dReport *report);

/*
 Step until `t_end` (within half a step). Stops early on divergence.

 # Safety
 As for [`bouss2d_solver_step`].
 */
enum Bouss2dStatus bouss2d_solver_advance(struct Bouss2dSolver *solver,
                                          double t_end,
                                          struct Bouss2dReport *report);

/*
 Current simulated time.

 # Safety
 `solver` must be a live handle (NaN is returned for null).
 */
double bouss2d_solver_time(const struct Bouss2dSolver *solver);

/*
 Number of grid nodes (length of every field array).

 # Safety
 `solver` must be a live handle (0 is returned for null).
 */
uintptr_t bouss2d_solver_field_len(const struct Bouss2dSolver *solver);

/*
 Copy the current temperature field (row-major, `j * nx + i`).

 # Safety
 `out` must point to at least `len` writable doubles, and `len` must equal
 [`bouss2d_solver_field_len`].
 */
enum Bouss2dStatus bouss2d_solver_theta(const struct Bouss2dSolver *solver,
                                        double *out,
                                        uintptr_t len);

/*
 Copy the current pressure field.

 # Safety
 As for [`bouss2d_solver_theta`].
 */
enum Bouss2dStatus bouss2d_solver_pressure(const struct Bouss2dSolver *solver,
                                           double *out,
                                           uintptr_t len);

/*
 Copy the current (rescaled) velocity components.

 # Safety
 Both `out_u` and `out_v` must point to at least `len` writable doubles,
 with `len` equal to [`bouss2d_solver_field_len`].
 */
enum Bouss2dStatus bouss2d_solver_velocity(const struct Bouss2dSolver *solver,
                                           double *out_u,
                                           double *out_v,
                                           uintptr_t len);

/*
 Release a solver handle. Null is a no-op.

 # Safety
 `solver` must be null or a handle from [`bouss2d_solver_new`] that has
 not been freed yet.
 */
void bouss2d_solver_free(struct Bouss2dSolver *solver);

/*
 Static, NUL-terminated name of a status code.
 */
const char *bouss2d_status_name(enum Bouss2dStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOUSS2D_H */
