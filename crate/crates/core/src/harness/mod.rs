//! Problem definitions, convergence studies, error norms, config files, and
//! CSV/VTK output.

mod config;
mod convergence;
mod io;
mod problems;

pub use config::Config;
pub use convergence::{
    error_norm_l2t_l2x, run_convergence_study, run_k_study, ErrorRow, ErrorTable, StudyOptions,
};
pub use io::{
    error_table_to_csv, parse_reports_csv, reports_to_csv, verify_to_csv, vtk_to_string,
    write_error_table_csv, write_reports_csv, write_verify_csv, write_vtk,
};
pub use problems::{manufactured_spec, marsigli_spec, shear_layer_spec};

use crate::error::Error;
use crate::grid::{BcKind, Grid, ScalarField, VectorField};
use crate::gsav::{derive_constants, GsavConstants};
use std::sync::Arc;

pub type TimeScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type TimeVectorFn = Arc<dyn Fn(f64, f64, f64) -> (f64, f64) + Send + Sync>;
pub type CouplingFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
/// Initial scalar profile `(x, y, h) -> value`; `h` is the mesh width, so
/// discontinuous data can be smoothed over a cell.
pub type InitScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type PlainScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type InitVectorFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Rectangular computational domain (the grid resolution is a run choice).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x0: f64,
    pub y0: f64,
    pub lx: f64,
    pub ly: f64,
}

impl Domain {
    pub fn grid(&self, nx: usize, ny: usize) -> Grid {
        Grid::new(self.x0, self.y0, self.lx, self.ly, nx, ny)
    }
}

/// Closed-form reference solution for error measurement (all as `(t, x, y)`
/// callables).
#[derive(Clone)]
pub struct ExactSolution {
    pub theta: TimeScalarFn,
    pub u: TimeVectorFn,
    pub p: TimeScalarFn,
}

/// Everything that defines one problem instance: domain, coefficients,
/// boundary conditions, forcing, initial data, and (optionally) the exact
/// solution.
///
/// The forcing callables must accept times up to `T + max(k, l) * tau`: the
/// scheme evaluates `g` at `t^{n+l}` and `f1` at `t^{n+k}`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub nu: f64,
    pub kappa: f64,
    pub theta_bc: BcKind,
    /// Time-dependent body force `f1(t, x, y)`.
    pub f1: TimeVectorFn,
    /// Temperature coupling `f2(theta)` with Lipschitz constant `alpha`.
    pub f2: CouplingFn,
    pub alpha: f64,
    /// Uniform bound of `f1` entering the stability constants (0 if unused).
    pub c_f1: f64,
    /// Uniform bound of `g` entering the stability constants (0 if unused).
    pub c_g: f64,
    pub g: TimeScalarFn,
    pub init_theta: InitScalarFn,
    pub init_u: InitVectorFn,
    pub init_p: PlainScalarFn,
    pub exact: Option<ExactSolution>,
    pub default_t_end: f64,
}

impl ProblemSpec {
    pub fn constants(&self) -> Result<GsavConstants, Error> {
        derive_constants(self.alpha, self.c_f1, self.c_g)
    }

    /// Sample the initial data on a grid (Dirichlet boundaries zeroed, the
    /// pressure left as given).
    pub fn initial_fields(&self, grid: Grid) -> (ScalarField, VectorField, ScalarField) {
        let h = grid.h_min();
        let theta = ScalarField::from_fn(grid, self.theta_bc, |x, y| (self.init_theta)(x, y, h));
        let u = VectorField::from_fn(grid, BcKind::DirichletZero, |x, y| (self.init_u)(x, y));
        let p = ScalarField::from_fn(grid, BcKind::NeumannZero, |x, y| (self.init_p)(x, y));
        (theta, u, p)
    }

    pub fn sample_f1(&self, t: f64, grid: Grid) -> VectorField {
        VectorField::from_fn(grid, BcKind::NeumannZero, |x, y| (self.f1)(t, x, y))
    }

    pub fn sample_g(&self, t: f64, grid: Grid) -> ScalarField {
        ScalarField::from_fn(grid, BcKind::NeumannZero, |x, y| (self.g)(t, x, y))
    }

    /// Apply the temperature coupling nodewise: `f2(theta)` as a field.
    pub fn f2_field(&self, theta: &ScalarField) -> VectorField {
        let grid = *theta.grid();
        let mut out = VectorField::zeros(grid, BcKind::NeumannZero);
        for (k, &th) in theta.values().iter().enumerate() {
            let (fx, fy) = (self.f2)(th);
            out.x.values_mut()[k] = fx;
            out.y.values_mut()[k] = fy;
        }
        out
    }

    pub fn exact_theta(&self, t: f64, grid: Grid) -> Option<ScalarField> {
        self.exact.as_ref().map(|e| {
            let f = e.theta.clone();
            ScalarField::from_fn(grid, self.theta_bc, move |x, y| f(t, x, y))
        })
    }

    pub fn exact_u(&self, t: f64, grid: Grid) -> Option<VectorField> {
        self.exact.as_ref().map(|e| {
            let f = e.u.clone();
            VectorField::from_fn(grid, BcKind::DirichletZero, move |x, y| f(t, x, y))
        })
    }

    pub fn exact_p(&self, t: f64, grid: Grid) -> Option<ScalarField> {
        self.exact.as_ref().map(|e| {
            let f = e.p.clone();
            ScalarField::from_fn(grid, BcKind::NeumannZero, move |x, y| f(t, x, y))
        })
    }
}
