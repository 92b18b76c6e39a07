//! Matrix-free conjugate-gradient solves for the two system types the
//! scheme needs: the shifted Laplacian `(sigma I - c lap) x = b` (all
//! implicit temperature/velocity work) and the pure Neumann-Poisson problem
//! `-lap psi = b` with a zero-mean solution (the pressure correction).
//!
//! CG runs in the trapezoidal inner product, under which both operators are
//! symmetric (the Neumann rows use mirrored ghosts). Jacobi (diagonal)
//! preconditioning; the diagonal is constant on a uniform grid.

use crate::error::Error;
use crate::grid::{BcKind, Grid, ScalarField};

/// Outcome of one CG solve.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative residual in the discrete L2 norm at exit.
    pub final_residual: f64,
    pub converged: bool,
    /// Per-iteration relative residuals; only filled when
    /// [`SolveOpts::track_residuals`] is set.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    pub rtol: f64,
    /// `None` selects the default `10 * nx * ny`.
    pub max_iter: Option<usize>,
    pub track_residuals: bool,
}

impl Default for SolveOpts {
    fn default() -> Self {
        // two orders below the smallest temporal errors we measure, so the
        // solver never pollutes convergence rates
        SolveOpts {
            rtol: 1e-10,
            max_iter: None,
            track_residuals: false,
        }
    }
}

#[inline]
fn weighted_dot(g: &Grid, a: &[f64], b: &[f64]) -> f64 {
    let cell = g.hx() * g.hy();
    let mut acc = 0.0;
    for j in 0..g.ny {
        let wy = if j == 0 || j == g.ny - 1 { 0.5 } else { 1.0 };
        let row = j * g.nx;
        let mut rowsum = 0.5 * a[row] * b[row];
        for i in 1..g.nx - 1 {
            rowsum += a[row + i] * b[row + i];
        }
        rowsum += 0.5 * a[row + g.nx - 1] * b[row + g.nx - 1];
        acc += wy * rowsum;
    }
    acc * cell
}

fn weighted_mean(g: &Grid, a: &[f64]) -> f64 {
    let cell = g.hx() * g.hy();
    let mut acc = 0.0;
    for j in 0..g.ny {
        let wy = if j == 0 || j == g.ny - 1 { 0.5 } else { 1.0 };
        let row = j * g.nx;
        let mut rowsum = 0.5 * a[row];
        for i in 1..g.nx - 1 {
            rowsum += a[row + i];
        }
        rowsum += 0.5 * a[row + g.nx - 1];
        acc += wy * rowsum;
    }
    acc * cell / g.area()
}

fn subtract_mean(g: &Grid, a: &mut [f64]) {
    let m = weighted_mean(g, a);
    for v in a.iter_mut() {
        *v -= m;
    }
}

/// Fused application of `sigma x - c lap x` with the grid's BC semantics.
/// Dirichlet rows are identities on a zero boundary; Neumann rows use
/// mirrored ghosts on the boundary.
fn apply_shifted(g: &Grid, sigma: f64, c: f64, bc: BcKind, x: &[f64], out: &mut [f64]) {
    let (nx, ny) = (g.nx, g.ny);
    let cx = c / (g.hx() * g.hx());
    let cy = c / (g.hy() * g.hy());
    for j in 1..ny - 1 {
        let row = j * nx;
        for i in 1..nx - 1 {
            let k = row + i;
            out[k] = (sigma + 2.0 * (cx + cy)) * x[k]
                - cx * (x[k - 1] + x[k + 1])
                - cy * (x[k - nx] + x[k + nx]);
        }
    }
    match bc {
        BcKind::DirichletZero => {
            for i in 0..nx {
                out[i] = 0.0;
                out[(ny - 1) * nx + i] = 0.0;
            }
            for j in 0..ny {
                out[j * nx] = 0.0;
                out[j * nx + nx - 1] = 0.0;
            }
        }
        BcKind::NeumannZero => {
            let at = |i: usize, j: usize, x: &[f64]| -> f64 {
                let k = j * nx + i;
                let left = if i == 0 { x[k + 1] } else { x[k - 1] };
                let right = if i == nx - 1 { x[k - 1] } else { x[k + 1] };
                let down = if j == 0 { x[k + nx] } else { x[k - nx] };
                let up = if j == ny - 1 { x[k - nx] } else { x[k + nx] };
                (sigma + 2.0 * (cx + cy)) * x[k] - cx * (left + right) - cy * (down + up)
            };
            for i in 0..nx {
                out[i] = at(i, 0, x);
                out[(ny - 1) * nx + i] = at(i, ny - 1, x);
            }
            for j in 1..ny - 1 {
                out[j * nx] = at(0, j, x);
                out[j * nx + nx - 1] = at(nx - 1, j, x);
            }
        }
    }
}

struct PcgProblem {
    sigma: f64,
    c: f64,
    bc: BcKind,
    /// Pure Neumann Laplacian: constants are a nullspace, keep the iterate
    /// mean-free (drift re-projection every 50 iterations).
    singular: bool,
}

fn pcg(
    g: &Grid,
    prob: &PcgProblem,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &SolveOpts,
) -> (Vec<f64>, SolveStats) {
    let n = g.len();
    let max_iter = opts.max_iter.unwrap_or(10 * n);
    let diag = prob.sigma + 2.0 * prob.c / (g.hx() * g.hx()) + 2.0 * prob.c / (g.hy() * g.hy());
    let inv_diag = 1.0 / diag;

    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; n],
    };
    if prob.bc == BcKind::DirichletZero {
        zero_boundary(g, &mut x);
    }
    if prob.singular {
        subtract_mean(g, &mut x);
    }

    let bnorm = weighted_dot(g, b, b).sqrt();
    let mut stats = SolveStats::default();
    if bnorm == 0.0 {
        stats.converged = true;
        return (vec![0.0; n], stats);
    }

    let mut r = vec![0.0; n];
    apply_shifted(g, prob.sigma, prob.c, prob.bc, &x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    if prob.bc == BcKind::DirichletZero {
        zero_boundary(g, &mut r);
    }

    let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
    let mut p = z.clone();
    let mut rz = weighted_dot(g, &r, &z);
    let mut ap = vec![0.0; n];

    let mut res = weighted_dot(g, &r, &r).sqrt() / bnorm;
    if opts.track_residuals {
        stats.residual_history.push(res);
    }
    if res <= opts.rtol {
        stats.converged = true;
        stats.final_residual = res;
        return (x, stats);
    }

    for iter in 1..=max_iter {
        apply_shifted(g, prob.sigma, prob.c, prob.bc, &p, &mut ap);
        let pap = weighted_dot(g, &p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            // operator lost definiteness numerically; report failure
            stats.iterations = iter;
            stats.final_residual = res;
            return (x, stats);
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if prob.singular && iter % 50 == 0 {
            subtract_mean(g, &mut x);
            subtract_mean(g, &mut r);
        }
        res = weighted_dot(g, &r, &r).sqrt() / bnorm;
        if opts.track_residuals {
            stats.residual_history.push(res);
        }
        stats.iterations = iter;
        if res <= opts.rtol {
            stats.converged = true;
            break;
        }
        for (zk, rk) in z.iter_mut().zip(r.iter()) {
            *zk = rk * inv_diag;
        }
        let rz_new = weighted_dot(g, &r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    stats.final_residual = res;
    if prob.singular {
        subtract_mean(g, &mut x);
    }
    (x, stats)
}

fn zero_boundary(g: &Grid, v: &mut [f64]) {
    let (nx, ny) = (g.nx, g.ny);
    for i in 0..nx {
        v[i] = 0.0;
        v[(ny - 1) * nx + i] = 0.0;
    }
    for j in 0..ny {
        v[j * nx] = 0.0;
        v[j * nx + nx - 1] = 0.0;
    }
}

/// Solve `(sigma I - c lap) x = rhs` to the requested relative residual.
///
/// `bc` selects the Laplacian variant and is inherited by the solution.
/// With `c = 0` the system is diagonal and CG finishes in one iteration.
pub fn solve_shifted(
    sigma: f64,
    c: f64,
    rhs: &ScalarField,
    bc: BcKind,
    guess: Option<&ScalarField>,
    opts: &SolveOpts,
) -> Result<(ScalarField, SolveStats), Error> {
    if sigma.is_nan() || sigma <= 0.0 || c < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shifted solve needs sigma > 0 and c >= 0 (got sigma={sigma}, c={c})"
        )));
    }
    let g = *rhs.grid();
    let mut b = rhs.values().to_vec();
    if bc == BcKind::DirichletZero {
        zero_boundary(&g, &mut b);
    }
    let prob = PcgProblem {
        sigma,
        c,
        bc,
        singular: false,
    };
    let (x, stats) = pcg(&g, &prob, &b, guess.map(|f| f.values()), opts);
    if !stats.converged {
        return Err(Error::SolveFailed { stats });
    }
    let mut out = ScalarField::zeros(g, bc);
    out.values_mut().copy_from_slice(&x);
    out.enforce_bc();
    Ok((out, stats))
}

/// Solve `-lap psi = rhs` with homogeneous Neumann data and a zero-mean
/// solution. The right-hand side is projected to zero mean first (the
/// compatibility condition), and the returned residual refers to the
/// projected system.
pub fn solve_poisson_neumann(
    rhs: &ScalarField,
    guess: Option<&ScalarField>,
    opts: &SolveOpts,
) -> Result<(ScalarField, SolveStats), Error> {
    let g = *rhs.grid();
    let mut b = rhs.values().to_vec();
    subtract_mean(&g, &mut b);
    let prob = PcgProblem {
        sigma: 0.0,
        c: 1.0,
        bc: BcKind::NeumannZero,
        singular: true,
    };
    let (mut x, stats) = pcg(&g, &prob, &b, guess.map(|f| f.values()), opts);
    if !stats.converged {
        return Err(Error::SolveFailed { stats });
    }
    subtract_mean(&g, &mut x);
    let mut out = ScalarField::zeros(g, BcKind::NeumannZero);
    out.values_mut().copy_from_slice(&x);
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{mean, norm_l2, Grid};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn opts() -> SolveOpts {
        SolveOpts::default()
    }

    #[test]
    fn diagonal_system_one_iteration() {
        let g = Grid::unit_square(17);
        let rhs = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| x * y + 0.3);
        let (x, stats) =
            solve_shifted(4.0, 0.0, &rhs, BcKind::DirichletZero, None, &opts()).unwrap();
        assert!(stats.iterations <= 1, "{}", stats.iterations);
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                assert!((x.get(i, j) - rhs.get(i, j) / 4.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let g = Grid::unit_square(9);
        let rhs = ScalarField::zeros(g, BcKind::DirichletZero);
        let (x, stats) =
            solve_shifted(1.0, 1.0, &rhs, BcKind::DirichletZero, None, &opts()).unwrap();
        assert_eq!(x.max_abs(), 0.0);
        assert_eq!(stats.iterations, 0);
        let (psi, _) = solve_poisson_neumann(&rhs, None, &opts()).unwrap();
        assert_eq!(psi.max_abs(), 0.0);
    }

    #[test]
    fn helmholtz_eigenfunction() {
        // (1 - lap) sin(pi x) sin(pi y) = (1 + 2 pi^2) sin(pi x) sin(pi y)
        let g = Grid::unit_square(129);
        let factor = 1.0 + 2.0 * PI * PI;
        let rhs = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| {
            factor * (PI * x).sin() * (PI * y).sin()
        });
        let (x, stats) =
            solve_shifted(1.0, 1.0, &rhs, BcKind::DirichletZero, None, &opts()).unwrap();
        assert!(stats.converged);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let expect = (PI * g.x(i)).sin() * (PI * g.y(j)).sin();
                assert!((x.get(i, j) - expect).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn neumann_poisson_eigenfunction() {
        // -lap cos(2 pi x) cos(2 pi y) = 8 pi^2 cos(2 pi x) cos(2 pi y)
        let g = Grid::unit_square(129);
        let rhs = ScalarField::from_fn(g, BcKind::NeumannZero, |x, y| {
            2.0 * (2.0 * PI) * (2.0 * PI) * (2.0 * PI * x).cos() * (2.0 * PI * y).cos()
        });
        let (psi, stats) = solve_poisson_neumann(&rhs, None, &opts()).unwrap();
        assert!(stats.converged);
        assert!(mean(&psi).abs() < 1e-12);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let expect = (2.0 * PI * g.x(i)).cos() * (2.0 * PI * g.y(j)).cos();
                assert!((psi.get(i, j) - expect).abs() < 1e-2, "({i},{j})");
            }
        }
    }

    #[test]
    fn neumann_poisson_constant_rhs_projected_away() {
        let g = Grid::unit_square(33);
        let rhs = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| 7.5);
        let (psi, _) = solve_poisson_neumann(&rhs, None, &opts()).unwrap();
        assert!(psi.max_abs() < 1e-12);
    }

    #[test]
    fn solution_independent_of_initial_guess() {
        let g = Grid::unit_square(33);
        let rhs = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| {
            (3.0 * x - y).sin() + 0.5 * x
        });
        let (x0, _) = solve_shifted(2.0, 0.7, &rhs, BcKind::DirichletZero, None, &opts()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut guess = ScalarField::zeros(g, BcKind::DirichletZero);
        for v in guess.values_mut() {
            *v = rng.random_range(-5.0..5.0);
        }
        let (x1, _) =
            solve_shifted(2.0, 0.7, &rhs, BcKind::DirichletZero, Some(&guess), &opts()).unwrap();
        let diff = x0.add_scaled(-1.0, &x1);
        assert!(norm_l2(&diff) <= 1e-9, "{}", norm_l2(&diff));
    }

    #[test]
    fn linear_in_rhs() {
        let g = Grid::unit_square(33);
        let a = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| (x * y).sin());
        let b = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| x - y * y);
        let sum = a.add_scaled(2.0, &b);
        let solve = |f: &ScalarField| {
            solve_shifted(1.0, 0.5, f, BcKind::DirichletZero, None, &opts())
                .unwrap()
                .0
        };
        let lhs = solve(&sum);
        let rhs = solve(&a).add_scaled(2.0, &solve(&b));
        let diff = lhs.add_scaled(-1.0, &rhs);
        assert!(norm_l2(&diff) <= 1e-8, "{}", norm_l2(&diff));
    }

    #[test]
    fn residual_history_decreases() {
        let g = Grid::unit_square(65);
        let rhs = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| {
            (PI * x).sin() * (PI * y).sin() + 0.2 * (3.0 * PI * x).sin() * (PI * y).sin()
        });
        let o = SolveOpts {
            track_residuals: true,
            ..SolveOpts::default()
        };
        let (_, stats) = solve_shifted(1.0, 1.0, &rhs, BcKind::DirichletZero, None, &o).unwrap();
        assert!(stats.residual_history.len() >= 2);
        // CG on this SPD system: no blow-ups along the way, ends at the min
        let mut prev = stats.residual_history[0];
        for &r in &stats.residual_history[1..] {
            assert!(r <= prev * 1.5 + 1e-300, "residual jumped: {prev} -> {r}");
            prev = r;
        }
        let min = stats
            .residual_history
            .iter()
            .cloned()
            .fold(f64::MAX, f64::min);
        assert!(stats.final_residual <= min * (1.0 + 1e-12));
    }

    #[test]
    fn nonconvergence_reports_stats() {
        let g = Grid::unit_square(65);
        let rhs = ScalarField::from_fn(g, BcKind::DirichletZero, |x, y| x + y);
        let o = SolveOpts {
            max_iter: Some(2),
            ..SolveOpts::default()
        };
        match solve_shifted(1.0, 1.0, &rhs, BcKind::DirichletZero, None, &o) {
            Err(Error::SolveFailed { stats }) => {
                assert_eq!(stats.iterations, 2);
                assert!(!stats.converged);
                assert!(stats.final_residual > 0.0);
            }
            other => panic!("expected SolveFailed, got {other:?}"),
        }
    }

    #[test]
    fn neumann_output_mean_zero_every_call() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..3 {
            let g = Grid::new(0.0, 0.0, 2.0, 1.0, 33, 17);
            let mut rhs = ScalarField::zeros(g, BcKind::NeumannZero);
            for v in rhs.values_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let (psi, _) = solve_poisson_neumann(&rhs, None, &opts()).unwrap();
            assert!(mean(&psi).abs() <= 1e-12, "trial {trial}: {}", mean(&psi));
        }
    }
}
