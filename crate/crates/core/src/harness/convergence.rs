//! Temporal convergence studies against a manufactured solution: the
//! `L2((0,T); L2)` error norm, the refinement ladder `tau_i = T / 2^{i+4}`,
//! and the error/ratio table.

use crate::error::Error;
use crate::grid::{norm_l2, norm_l2_vec, Grid, ScalarField};
use crate::harness::ProblemSpec;
use crate::stepper::{run, History, RunSink, RunStatus, SchemeConfig, StepReport};

/// `sqrt(sum_n tau |e^n|^2)`: the discrete `L2((0,T); L2)` norm of an error
/// series, one field per accepted step.
pub fn error_norm_l2t_l2x(errors: &[ScalarField], tau: f64) -> f64 {
    let mut acc = 0.0;
    for e in errors {
        let n = norm_l2(e);
        acc += tau * n * n;
    }
    acc.sqrt()
}

/// One refinement level of the study.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub refinement: usize,
    pub tau: f64,
    pub err_u_bar: f64,
    pub err_u: f64,
    pub err_p: f64,
    pub err_theta: f64,
    /// `max_n |1 - eta^n|` over the run.
    pub max_eta_dev: f64,
    /// `max_n |div u_bar^n|` over the run (diagnostic).
    pub max_div_norm: f64,
    pub diverged: bool,
}

/// Error table plus the metadata needed to reproduce it. Ratios are always
/// recomputed from the stored errors.
#[derive(Debug, Clone)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    pub grid_nodes: (usize, usize),
    pub t_end: f64,
    pub nu: f64,
    pub kappa: f64,
    pub k: f64,
    pub l: f64,
    /// Set when the spatial-floor check forced one grid doubling.
    pub grid_doubled: bool,
}

impl ErrorTable {
    /// Ratio of successive errors, `err_{i-1} / err_i`, per field:
    /// `(u_bar, u, p, theta)`. `None` for the first row.
    pub fn ratios(&self) -> Vec<Option<(f64, f64, f64, f64)>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            out.push(Some((
                w[0].err_u_bar / w[1].err_u_bar,
                w[0].err_u / w[1].err_u,
                w[0].err_p / w[1].err_p,
                w[0].err_theta / w[1].err_theta,
            )));
        }
        out
    }

    /// Ratio of `max |1 - eta|` between successive refinements.
    pub fn eta_dev_ratios(&self) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            out.push(Some(w[0].max_eta_dev / w[1].max_eta_dev));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StudyOptions {
    /// Number of refinement levels `i = 0 .. refinements-1`.
    pub refinements: usize,
    /// `tau_i = t_end / 2^{i + base_exponent}`.
    pub base_exponent: u32,
    /// Nodes per direction of the (square) study grid.
    pub grid_nodes: usize,
    /// Estimate the spatial error floor at the coarsest refinement and
    /// double the grid once if it exceeds 10% of the total error there.
    pub check_spatial_floor: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            refinements: 5,
            base_exponent: 4,
            grid_nodes: 129,
            check_spatial_floor: true,
        }
    }
}

/// Accumulates per-step error norms against the exact solution.
struct ErrorSink<'a> {
    spec: &'a ProblemSpec,
    grid: Grid,
    tau: f64,
    sum_u_bar: f64,
    sum_u: f64,
    sum_p: f64,
    sum_theta: f64,
    max_eta_dev: f64,
    max_div_norm: f64,
}

impl<'a> ErrorSink<'a> {
    fn new(spec: &'a ProblemSpec, grid: Grid, tau: f64) -> Self {
        ErrorSink {
            spec,
            grid,
            tau,
            sum_u_bar: 0.0,
            sum_u: 0.0,
            sum_p: 0.0,
            sum_theta: 0.0,
            max_eta_dev: 0.0,
            max_div_norm: 0.0,
        }
    }

    fn row(&self, refinement: usize, diverged: bool) -> ErrorRow {
        ErrorRow {
            refinement,
            tau: self.tau,
            err_u_bar: self.sum_u_bar.sqrt(),
            err_u: self.sum_u.sqrt(),
            err_p: self.sum_p.sqrt(),
            err_theta: self.sum_theta.sqrt(),
            max_eta_dev: self.max_eta_dev,
            max_div_norm: self.max_div_norm,
            diverged,
        }
    }
}

impl RunSink for ErrorSink<'_> {
    fn on_state(&mut self, _step: usize, t: f64, hist: &History, report: &StepReport) {
        let th_e = self.spec.exact_theta(t, self.grid).unwrap();
        let u_e = self.spec.exact_u(t, self.grid).unwrap();
        let p_e = self.spec.exact_p(t, self.grid).unwrap();
        let e_ub = norm_l2_vec(&hist.u_bar.0.add_scaled(-1.0, &u_e));
        let e_u = norm_l2_vec(&hist.u.0.add_scaled(-1.0, &u_e));
        let e_p = norm_l2(&hist.p.0.add_scaled(-1.0, &p_e));
        let e_th = norm_l2(&hist.theta.0.add_scaled(-1.0, &th_e));
        self.sum_u_bar += self.tau * e_ub * e_ub;
        self.sum_u += self.tau * e_u * e_u;
        self.sum_p += self.tau * e_p * e_p;
        self.sum_theta += self.tau * e_th * e_th;
        self.max_eta_dev = self.max_eta_dev.max((1.0 - report.eta).abs());
        self.max_div_norm = self.max_div_norm.max(report.div_norm);
    }
}

fn study_level(
    spec: &ProblemSpec,
    grid: Grid,
    cfg: SchemeConfig,
    refinement: usize,
    tau: f64,
    t_end: f64,
) -> Result<ErrorRow, Error> {
    let mut sink = ErrorSink::new(spec, grid, tau);
    let outcome = run(spec, grid, cfg, tau, t_end, &mut sink)?;
    let diverged = matches!(outcome.status, RunStatus::Diverged { .. });
    Ok(sink.row(refinement, diverged))
}

/// Run the refinement ladder on a fixed spatial grid and assemble the error
/// table. The problem must carry an exact solution.
pub fn run_convergence_study(
    spec: &ProblemSpec,
    cfg: SchemeConfig,
    t_end: f64,
    opts: &StudyOptions,
) -> Result<ErrorTable, Error> {
    if spec.exact.is_none() {
        return Err(Error::InvalidParameter(
            "convergence study requires an exact solution".into(),
        ));
    }
    let mut n = opts.grid_nodes;
    let mut grid_doubled = false;
    let tau0 = t_end / 2f64.powi(opts.base_exponent as i32);

    if opts.check_spatial_floor {
        // Richardson split of the coarsest-level error into temporal and
        // spatial parts: rerun level 0 on a doubled grid; the squared error
        // difference estimates the (squared) spatial floor per field. The
        // grid doubles once if any field's floor exceeds 10% of its
        // coarsest-level error.
        let g1 = spec.domain.grid(n, n);
        let g2 = spec.domain.grid(2 * (n - 1) + 1, 2 * (n - 1) + 1);
        let row1 = study_level(spec, g1, cfg, 0, tau0, t_end)?;
        let row2 = study_level(spec, g2, cfg, 0, tau0, t_end)?;
        let fields = [
            (row1.err_u_bar, row2.err_u_bar),
            (row1.err_u, row2.err_u),
            (row1.err_p, row2.err_p),
            (row1.err_theta, row2.err_theta),
        ];
        let polluted = fields.iter().any(|&(e1, e2)| {
            let spatial_sq = (e1 * e1 - e2 * e2).max(0.0) * 16.0 / 15.0;
            spatial_sq.sqrt() > 0.1 * e1
        });
        if polluted {
            n = 2 * (n - 1) + 1;
            grid_doubled = true;
        }
    }

    let grid = spec.domain.grid(n, n);
    let mut rows = Vec::with_capacity(opts.refinements);
    for i in 0..opts.refinements {
        let tau = t_end / 2f64.powi((i as u32 + opts.base_exponent) as i32);
        rows.push(study_level(spec, grid, cfg, i, tau, t_end)?);
    }
    Ok(ErrorTable {
        rows,
        grid_nodes: (n, n),
        t_end,
        nu: spec.nu,
        kappa: spec.kappa,
        k: cfg.bdf.k,
        l: cfg.bdf.l,
        grid_doubled,
    })
}

/// Fixed-step study over several extrapolation widths `k`; returns
/// `(k, theta error)` pairs. Used for the error-vs-k sanity check.
pub fn run_k_study(
    spec: &ProblemSpec,
    mut cfg: SchemeConfig,
    t_end: f64,
    tau: f64,
    grid_nodes: usize,
    ks: &[f64],
) -> Result<Vec<(f64, f64)>, Error> {
    let grid = spec.domain.grid(grid_nodes, grid_nodes);
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        cfg.bdf = crate::operators::BdfParams::new(k, cfg.bdf.l)?;
        let row = study_level(spec, grid, cfg, 0, tau, t_end)?;
        out.push((k, row.err_theta));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BcKind;

    #[test]
    fn l2t_l2x_norm_examples() {
        let g = Grid::unit_square(17);
        let tau = 0.25;
        // all-zero errors
        let zeros = vec![ScalarField::zeros(g, BcKind::NeumannZero); 4];
        assert_eq!(error_norm_l2t_l2x(&zeros, tau), 0.0);
        // constant error c over N steps: c sqrt(N tau)
        let c = 0.75;
        let field = ScalarField::from_fn(g, BcKind::NeumannZero, |_, _| c);
        let series = vec![field.clone(); 8];
        let expect = c * (8.0 * tau).sqrt();
        assert!((error_norm_l2t_l2x(&series, tau) - expect).abs() < 1e-12);
        // single snapshot: sqrt(tau) |e|
        let single = vec![field];
        assert!((error_norm_l2t_l2x(&single, tau) - c * tau.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ratios_recomputed_from_errors() {
        let row = |i: usize, e: f64| ErrorRow {
            refinement: i,
            tau: 0.1 / 2f64.powi(i as i32),
            err_u_bar: e,
            err_u: e * 1.5,
            err_p: e * 2.0,
            err_theta: e * 0.5,
            max_eta_dev: e * e,
            max_div_norm: 0.0,
            diverged: false,
        };
        let table = ErrorTable {
            rows: vec![row(0, 0.4), row(1, 0.1), row(2, 0.025)],
            grid_nodes: (129, 129),
            t_end: 1.0,
            nu: 1.0,
            kappa: 1.0,
            k: 3.0,
            l: 1.0,
            grid_doubled: false,
        };
        let ratios = table.ratios();
        assert!(ratios[0].is_none());
        let (rub, ru, rp, rth) = ratios[1].unwrap();
        for r in [rub, ru, rp, rth] {
            assert!((r - 4.0).abs() <= 1e-15 * 4.0);
        }
        let (rub, ..) = ratios[2].unwrap();
        assert!((rub - 4.0).abs() <= 1e-15 * 4.0);
        let eta_ratios = table.eta_dev_ratios();
        assert!((eta_ratios[1].unwrap() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn study_requires_exact_solution() {
        let spec = crate::harness::marsigli_spec();
        let cfg = SchemeConfig::default();
        let opts = StudyOptions::default();
        assert!(run_convergence_study(&spec, cfg, 1.0, &opts).is_err());
    }

    #[test]
    fn single_refinement_coarse_smoke() {
        // tiny grid, one refinement: exercises the full plumbing
        let spec = crate::harness::manufactured_spec();
        let cfg = SchemeConfig::default();
        let opts = StudyOptions {
            refinements: 1,
            base_exponent: 3,
            grid_nodes: 33,
            check_spatial_floor: false,
        };
        let table = run_convergence_study(&spec, cfg, spec.default_t_end, &opts).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.ratios()[0].is_none());
        assert!(table.rows[0].err_theta.is_finite());
        assert!(!table.rows[0].diverged);
    }
}
