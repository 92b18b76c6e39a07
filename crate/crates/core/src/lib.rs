//! 2D incompressible Boussinesq solver with a GSAV-stabilized BDF(k)
//! consistent-splitting time discretization on a collocated
//! finite-difference grid.
//!
//! The crate is organized around the scheme's moving parts:
//!
//! - [`grid`]: fields, trapezoidal inner products, norms, zero-mean
//!   projection
//! - [`operators`]: spatial stencils and the sequence operators `D^k`,
//!   `delta^k`
//! - [`linsolve`]: matrix-free CG for the shifted-Laplacian and
//!   Neumann-Poisson systems
//! - [`gsav`]: auxiliary-variable energy machinery (`r`, `xi`, `eta`)
//! - [`stepper`]: one full time step, bootstrap, and the run loop
//! - [`verify`]: standalone numerical verification of the scheme's
//!   algebraic identities and consistency orders
//! - [`harness`]: problem definitions, convergence studies, config parsing,
//!   CSV/VTK output

pub mod cli;
pub mod error;
pub mod grid;
pub mod gsav;
pub mod harness;
pub mod linsolve;
pub mod operators;
pub mod stepper;
pub mod verify;

pub use error::Error;
pub use grid::{BcKind, Grid, ScalarField, VectorField};
