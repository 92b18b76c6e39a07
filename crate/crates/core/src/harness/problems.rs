//! The three benchmark problems: a manufactured convergence case with
//! closed-form forcing, the Marsigli lock-exchange flow, and the double
//! shear layer used by the stabilization study.

use super::{Domain, ExactSolution, ProblemSpec};
use crate::grid::BcKind;
use std::f64::consts::PI;
use std::sync::Arc;

/// Manufactured solution on the unit square with `T = pi`:
///
/// ```text
/// u     = sin(t) (sin^2(2 pi x) sin(2 pi y) cos(2 pi y),
///                 -sin(2 pi x) cos(2 pi x) sin^2(2 pi y))
/// p = theta = sin(t) sin(2 pi x) sin(2 pi y)
/// ```
///
/// The velocity is divergence-free and all fields vanish on the boundary;
/// the temperature couples back through `f2(theta) = (theta, 0)`. The
/// forcings `f1` and `g` below are the hand-differentiated closed forms; an
/// independent finite-difference residual check lives in the tests.
///
/// Material parameters are `nu = kappa = 1` (not fixed by the benchmark
/// definition; recorded in the convergence-table metadata).
pub fn manufactured_spec() -> ProblemSpec {
    let nu = 1.0;
    let kappa = 1.0;

    // building blocks (time factor stripped)
    let s = |x: f64, y: f64| (2.0 * PI * x).sin() * (2.0 * PI * y).sin();
    let a = |x: f64, y: f64| 0.5 * (2.0 * PI * x).sin().powi(2) * (4.0 * PI * y).sin();
    let b = |x: f64, y: f64| 0.5 * (4.0 * PI * x).sin() * (2.0 * PI * y).sin().powi(2);
    let ax = |x: f64, y: f64| PI * (4.0 * PI * x).sin() * (4.0 * PI * y).sin();
    let ay = |x: f64, y: f64| 2.0 * PI * (2.0 * PI * x).sin().powi(2) * (4.0 * PI * y).cos();
    let bx = |x: f64, y: f64| 2.0 * PI * (4.0 * PI * x).cos() * (2.0 * PI * y).sin().powi(2);
    let by = |x: f64, y: f64| PI * (4.0 * PI * x).sin() * (4.0 * PI * y).sin();
    let lap_a =
        |x: f64, y: f64| 4.0 * PI * PI * (2.0 * (4.0 * PI * x).cos() - 1.0) * (4.0 * PI * y).sin();
    let lap_b =
        |x: f64, y: f64| 4.0 * PI * PI * (4.0 * PI * x).sin() * (2.0 * (4.0 * PI * y).cos() - 1.0);
    let px = |x: f64, y: f64| 2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).sin();
    let py = |x: f64, y: f64| 2.0 * PI * (2.0 * PI * x).sin() * (2.0 * PI * y).cos();

    let exact = ExactSolution {
        theta: Arc::new(move |t, x, y| t.sin() * s(x, y)),
        u: Arc::new(move |t, x, y| (t.sin() * a(x, y), -t.sin() * b(x, y))),
        p: Arc::new(move |t, x, y| t.sin() * s(x, y)),
    };

    // g = d theta/dt + u . grad theta - kappa lap theta; the advection term
    // vanishes identically for this velocity/temperature pair
    let g = Arc::new(move |t: f64, x: f64, y: f64| {
        (t.cos() + 8.0 * PI * PI * kappa * t.sin()) * s(x, y)
    });

    // f1 = du/dt + (u . grad) u - nu lap u + grad p - f2(theta)
    let f1 = Arc::new(move |t: f64, x: f64, y: f64| {
        let (st, ct) = (t.sin(), t.cos());
        let st2 = st * st;
        let fx = ct * a(x, y) + st2 * (a(x, y) * ax(x, y) - b(x, y) * ay(x, y))
            - nu * st * lap_a(x, y)
            + st * px(x, y)
            - st * s(x, y);
        let fy = -ct * b(x, y)
            + st2 * (-a(x, y) * bx(x, y) + b(x, y) * by(x, y))
            + nu * st * lap_b(x, y)
            + st * py(x, y);
        (fx, fy)
    });

    ProblemSpec {
        name: "manufactured".into(),
        domain: Domain {
            x0: 0.0,
            y0: 0.0,
            lx: 1.0,
            ly: 1.0,
        },
        nu,
        kappa,
        theta_bc: BcKind::DirichletZero,
        f1,
        f2: Arc::new(|theta| (theta, 0.0)),
        alpha: 1.0,
        c_f1: 0.0,
        c_g: 0.0,
        g,
        init_theta: Arc::new(|_, _, _| 0.0),
        init_u: Arc::new(|_, _| (0.0, 0.0)),
        init_p: Arc::new(|_, _| 0.0),
        exact: Some(exact),
        default_t_end: PI,
    }
}

/// Marsigli lock-exchange flow on `(0, 8) x (0, 1)` with `Re = 5000`,
/// `Ri = 4`, `Pr = 1` and `T = 10`: two temperature plateaus (3/2 left of
/// x = 4, 1 right of it) drive counter-flowing gravity currents through the
/// buoyancy term `f2(theta) = Ri theta e_up`.
///
/// The discontinuous initial temperature is replaced by a tanh profile of
/// width `2h` so a collocated nodal field sees a resolved transition.
pub fn marsigli_spec() -> ProblemSpec {
    let re = 5000.0;
    let ri = 4.0;
    let pr = 1.0;
    ProblemSpec {
        name: "marsigli".into(),
        domain: Domain {
            x0: 0.0,
            y0: 0.0,
            lx: 8.0,
            ly: 1.0,
        },
        nu: 1.0 / re,
        kappa: 1.0 / (re * pr),
        theta_bc: BcKind::NeumannZero,
        f1: Arc::new(|_, _, _| (0.0, 0.0)),
        f2: Arc::new(move |theta| (0.0, ri * theta)),
        alpha: ri,
        c_f1: 0.0,
        c_g: 0.0,
        g: Arc::new(|_, _, _| 0.0),
        init_theta: Arc::new(|x, _, h| 1.25 - 0.25 * ((x - 4.0) / (2.0 * h)).tanh()),
        init_u: Arc::new(|_, _| (0.0, 0.0)),
        init_p: Arc::new(|_, _| 0.0),
        exact: None,
        default_t_end: 10.0,
    }
}

/// Double shear layer on `(-1, 1)^2` with `nu = 0.005`, `f = 0`, `g = 0`
/// and the temperature switched off (`theta_0 = 0`): two tanh layers of
/// steepness `rho = 100` at `x2 = +-1/2`, perturbed by
/// `u2 = delta sin(pi x1)` with `delta = 1/2`. The benchmark for the
/// spatial stabilization study.
pub fn shear_layer_spec() -> ProblemSpec {
    let rho = 100.0;
    let delta = 0.5;
    ProblemSpec {
        name: "shear".into(),
        domain: Domain {
            x0: -1.0,
            y0: -1.0,
            lx: 2.0,
            ly: 2.0,
        },
        nu: 0.005,
        kappa: 0.005,
        theta_bc: BcKind::NeumannZero,
        f1: Arc::new(|_, _, _| (0.0, 0.0)),
        f2: Arc::new(|_| (0.0, 0.0)),
        alpha: 0.0,
        c_f1: 0.0,
        c_g: 0.0,
        g: Arc::new(|_, _, _| 0.0),
        init_theta: Arc::new(|_, _, _| 0.0),
        init_u: Arc::new(move |x, y| {
            let sign = if y <= 0.0 { 1.0 } else { -1.0 };
            let u1 = (1.0 + x) * (1.0 - y) * (rho * (sign * y + 0.5)).tanh();
            let u2 = delta * (PI * x).sin();
            (u1, u2)
        }),
        init_p: Arc::new(|_, _| 0.0),
        exact: None,
        default_t_end: 1.0,
    }
}
