//! C ABI for the bouss2d solver: opaque solver handles, plain-C config and
//! report structs, and integer status codes. The header is generated by
//! cbindgen into `include/bouss2d.h` at build time.
//!
//! Ownership rules: every `*mut Bouss2dSolver` returned by
//! [`bouss2d_solver_new`] must be released with [`bouss2d_solver_free`].
//! All other pointers are borrowed for the duration of the call only.

use bouss2d::grid::Grid;
use bouss2d::gsav::GsavState;
use bouss2d::harness::{manufactured_spec, marsigli_spec, shear_layer_spec, ProblemSpec};
use bouss2d::linsolve::SolveOpts;
use bouss2d::operators::BdfParams;
use bouss2d::stepper::{History, SchemeConfig, StabKind, Stabilization, StepReport, Stepper};
use bouss2d::ScalarField;
use std::ffi::c_char;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bouss2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    Diverged = 4,
}

/// Built-in problem selection.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bouss2dProblem {
    Manufactured = 0,
    Marsigli = 1,
    ShearLayer = 2,
}

/// Spatial stabilization of the velocity equation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bouss2dStab {
    None = 0,
    Sa = 1,
    Sb = 2,
}

/// Run configuration. `nx`/`ny` count grid nodes including the boundary;
/// `k` and `l` are the (real) extrapolation widths.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Bouss2dConfig {
    pub nx: u32,
    pub ny: u32,
    pub tau: f64,
    pub k: f64,
    pub l: f64,
    pub stab: Bouss2dStab,
    pub cs: f64,
}

/// Per-step diagnostics mirrored from the solver.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct Bouss2dReport {
    pub step: u64,
    pub t: f64,
    pub energy: f64,
    pub r: f64,
    pub xi: f64,
    pub eta: f64,
    pub div_norm: f64,
}

/// Opaque solver handle.
pub struct Bouss2dSolver {
    spec: ProblemSpec,
    grid: Grid,
    cfg: SchemeConfig,
    tau: f64,
    hist: History,
    gsav: GsavState,
    psi: Option<ScalarField>,
    step: u64,
    t: f64,
    initial_energy: f64,
    diverged: bool,
    last_report: Bouss2dReport,
}

fn mirror(report: &StepReport) -> Bouss2dReport {
    Bouss2dReport {
        step: report.step as u64,
        t: report.t,
        energy: report.energy,
        r: report.r,
        xi: report.xi,
        eta: report.eta,
        div_norm: report.div_norm,
    }
}

impl Bouss2dSolver {
    fn advance_one(&mut self) -> Bouss2dStatus {
        if self.diverged {
            return Bouss2dStatus::Diverged;
        }
        let stepper = match Stepper::new(&self.spec, self.grid, self.cfg) {
            Ok(s) => s,
            Err(_) => return Bouss2dStatus::InvalidArgument,
        };
        let t_n = self.step as f64 * self.tau;
        match stepper.full_step(
            &self.hist,
            &self.gsav,
            self.tau,
            t_n,
            self.step as usize + 1,
            self.psi.as_ref(),
        ) {
            Ok((hist, gsav, report, psi)) => {
                self.step += 1;
                self.t = report.t;
                self.last_report = mirror(&report);
                let blown = !report.is_finite()
                    || (self.initial_energy > 0.0
                        && report.energy > self.cfg.blowup_factor * self.initial_energy);
                self.hist = hist;
                self.gsav = gsav;
                self.psi = Some(psi);
                if blown {
                    self.diverged = true;
                    Bouss2dStatus::Diverged
                } else {
                    Bouss2dStatus::Ok
                }
            }
            Err(_) => {
                self.diverged = true;
                Bouss2dStatus::SolverFailure
            }
        }
    }
}

/// Create a solver for one of the built-in problems and run its bootstrap.
/// On success `*out` owns the new solver.
///
/// # Safety
/// `config` must point to a valid [`Bouss2dConfig`] and `out` to writable
/// pointer storage; both only need to live for this call.
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_new(
    problem: Bouss2dProblem,
    config: *const Bouss2dConfig,
    out: *mut *mut Bouss2dSolver,
) -> Bouss2dStatus {
    if config.is_null() || out.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    let config = &*config;
    if config.nx < 3 || config.ny < 3 || config.tau.is_nan() || config.tau <= 0.0 {
        return Bouss2dStatus::InvalidArgument;
    }
    let spec = match problem {
        Bouss2dProblem::Manufactured => manufactured_spec(),
        Bouss2dProblem::Marsigli => marsigli_spec(),
        Bouss2dProblem::ShearLayer => shear_layer_spec(),
    };
    let bdf = match BdfParams::new(config.k, config.l) {
        Ok(b) => b,
        Err(_) => return Bouss2dStatus::InvalidArgument,
    };
    let stab_kind = match config.stab {
        Bouss2dStab::None => StabKind::None,
        Bouss2dStab::Sa => StabKind::Sa,
        Bouss2dStab::Sb => StabKind::Sb,
    };
    let stab = match Stabilization::new(stab_kind, config.cs) {
        Ok(s) => s,
        Err(_) => return Bouss2dStatus::InvalidArgument,
    };
    let cfg = SchemeConfig {
        bdf,
        stab,
        solve: SolveOpts::default(),
        blowup_factor: 10.0,
    };
    let grid = Grid::new(
        spec.domain.x0,
        spec.domain.y0,
        spec.domain.lx,
        spec.domain.ly,
        config.nx as usize,
        config.ny as usize,
    );
    let boot = {
        let stepper = match Stepper::new(&spec, grid, cfg) {
            Ok(s) => s,
            Err(_) => return Bouss2dStatus::InvalidArgument,
        };
        match stepper.bootstrap(config.tau) {
            Ok(b) => b,
            Err(_) => return Bouss2dStatus::SolverFailure,
        }
    };
    let solver = Box::new(Bouss2dSolver {
        spec,
        grid,
        cfg,
        tau: config.tau,
        t: boot.report.t,
        last_report: mirror(&boot.report),
        hist: boot.history,
        gsav: boot.gsav,
        psi: None,
        step: 1,
        initial_energy: boot.initial_energy,
        diverged: false,
    });
    *out = Box::into_raw(solver);
    Bouss2dStatus::Ok
}

/// Advance one time step. `report` (optional) receives the step
/// diagnostics. Returns `Diverged` when the energy blow-up guard trips and
/// `SolverFailure` when an inner solve does not converge; the solver then
/// refuses further steps.
///
/// # Safety
/// `solver` must be a live handle from [`bouss2d_solver_new`]; `report` must
/// be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_step(
    solver: *mut Bouss2dSolver,
    report: *mut Bouss2dReport,
) -> Bouss2dStatus {
    if solver.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    let solver = &mut *solver;
    let status = solver.advance_one();
    if !report.is_null() {
        *report = solver.last_report;
    }
    status
}

/// Step until `t_end` (within half a step). Stops early on divergence.
///
/// # Safety
/// As for [`bouss2d_solver_step`].
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_advance(
    solver: *mut Bouss2dSolver,
    t_end: f64,
    report: *mut Bouss2dReport,
) -> Bouss2dStatus {
    if solver.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    let solver_ref = &mut *solver;
    let mut status = Bouss2dStatus::Ok;
    while solver_ref.t + 0.5 * solver_ref.tau < t_end {
        status = solver_ref.advance_one();
        if status != Bouss2dStatus::Ok {
            break;
        }
    }
    if !report.is_null() {
        *report = solver_ref.last_report;
    }
    status
}

/// Current simulated time.
///
/// # Safety
/// `solver` must be a live handle (NaN is returned for null).
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_time(solver: *const Bouss2dSolver) -> f64 {
    if solver.is_null() {
        return f64::NAN;
    }
    (*solver).t
}

/// Number of grid nodes (length of every field array).
///
/// # Safety
/// `solver` must be a live handle (0 is returned for null).
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_field_len(solver: *const Bouss2dSolver) -> usize {
    if solver.is_null() {
        return 0;
    }
    (*solver).grid.len()
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Bouss2dStatus {
    if out.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    if len != values.len() {
        return Bouss2dStatus::InvalidArgument;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, len);
    Bouss2dStatus::Ok
}

/// Copy the current temperature field (row-major, `j * nx + i`).
///
/// # Safety
/// `out` must point to at least `len` writable doubles, and `len` must equal
/// [`bouss2d_solver_field_len`].
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_theta(
    solver: *const Bouss2dSolver,
    out: *mut f64,
    len: usize,
) -> Bouss2dStatus {
    if solver.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    copy_out((*solver).hist.theta.0.values(), out, len)
}

/// Copy the current pressure field.
///
/// # Safety
/// As for [`bouss2d_solver_theta`].
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_pressure(
    solver: *const Bouss2dSolver,
    out: *mut f64,
    len: usize,
) -> Bouss2dStatus {
    if solver.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    copy_out((*solver).hist.p.0.values(), out, len)
}

/// Copy the current (rescaled) velocity components.
///
/// # Safety
/// Both `out_u` and `out_v` must point to at least `len` writable doubles,
/// with `len` equal to [`bouss2d_solver_field_len`].
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_velocity(
    solver: *const Bouss2dSolver,
    out_u: *mut f64,
    out_v: *mut f64,
    len: usize,
) -> Bouss2dStatus {
    if solver.is_null() {
        return Bouss2dStatus::NullPointer;
    }
    let s = &*solver;
    let st = copy_out(s.hist.u.0.x.values(), out_u, len);
    if st != Bouss2dStatus::Ok {
        return st;
    }
    copy_out(s.hist.u.0.y.values(), out_v, len)
}

/// Release a solver handle. Null is a no-op.
///
/// # Safety
/// `solver` must be null or a handle from [`bouss2d_solver_new`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bouss2d_solver_free(solver: *mut Bouss2dSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn bouss2d_status_name(status: Bouss2dStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        Bouss2dStatus::Ok => b"ok\0",
        Bouss2dStatus::NullPointer => b"null pointer\0",
        Bouss2dStatus::InvalidArgument => b"invalid argument\0",
        Bouss2dStatus::SolverFailure => b"solver failure\0",
        Bouss2dStatus::Diverged => b"diverged\0",
    };
    name.as_ptr() as *const c_char
}
