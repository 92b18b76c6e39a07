//! One full time step of the GSAV-BDF(k) consistent-splitting scheme, the
//! two-level bootstrap, and the run loop.
//!
//! Each step decouples into four sequential solves (temperature, two
//! velocity components, pressure correction), followed by the explicit
//! pressure recursion and the auxiliary-variable update that rescales the
//! velocity. Everything implicit is a shifted Laplacian; the correction
//! `psi` is a Neumann-Poisson solve.

use crate::error::Error;
use crate::grid::{mean_zero_project, norm_l2, BcKind, Grid, ScalarField, VectorField};
use crate::gsav::{compute_xi_eta, energy, energy_rate, update_r, GsavConstants, GsavState};
use crate::harness::ProblemSpec;
use crate::linsolve::{solve_poisson_neumann, solve_shifted, SolveOpts, SolveStats};
use crate::operators::{
    advect, advect_vec, bdf_comb_vec, divergence, extrap, extrap_vec, gradient, laplacian,
    laplacian_vec, BdfParams,
};

/// Spatial stabilization added to the velocity equation (none by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabKind {
    None,
    /// `S_a = 2 tau c_s h (-lap) D^k(u_bar^{n+1}, u^n, u^{n-1})`
    Sa,
    /// `S_b = 2 tau c_s h (-lap) (u_bar^{n+1} - u^{n-1})`
    Sb,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stabilization {
    pub kind: StabKind,
    pub cs: f64,
}

impl Default for Stabilization {
    fn default() -> Self {
        Stabilization {
            kind: StabKind::None,
            cs: 0.5,
        }
    }
}

impl Stabilization {
    pub fn new(kind: StabKind, cs: f64) -> Result<Self, Error> {
        if cs < 0.0 {
            return Err(Error::InvalidParameter(
                "stabilization scale cs must be >= 0".into(),
            ));
        }
        Ok(Stabilization { kind, cs })
    }
}

/// The two time levels the recurrence needs, most recent first.
#[derive(Debug, Clone)]
pub struct History {
    /// `(theta^n, theta^{n-1})`
    pub theta: (ScalarField, ScalarField),
    /// Unscaled velocity `(u_bar^n, u_bar^{n-1})`
    pub u_bar: (VectorField, VectorField),
    /// Scaled velocity `(u^n, u^{n-1})`
    pub u: (VectorField, VectorField),
    /// `(p^n, p^{n-1})`
    pub p: (ScalarField, ScalarField),
}

/// Iteration counts and residuals of the four solves inside one step.
#[derive(Debug, Clone, Default)]
pub struct SubSolveStats {
    pub theta: SolveStats,
    pub ux: SolveStats,
    pub uy: SolveStats,
    pub psi: SolveStats,
}

/// Per-step diagnostics.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// Index of the produced state (state `n+1` after stepping from `n`).
    pub step: usize,
    pub t: f64,
    /// `E(theta^{n+1}, u_bar^{n+1})`.
    pub energy: f64,
    pub r: f64,
    pub xi: f64,
    pub eta: f64,
    /// `| div u_bar^{n+1} |` in the discrete L2 norm.
    pub div_norm: f64,
    pub solver: SubSolveStats,
}

impl StepReport {
    pub fn is_finite(&self) -> bool {
        self.energy.is_finite()
            && self.r.is_finite()
            && self.xi.is_finite()
            && self.eta.is_finite()
            && self.div_norm.is_finite()
    }
}

/// Scheme configuration: extrapolation widths, stabilization, solver
/// tolerances, and the divergence-declaration threshold.
#[derive(Debug, Clone, Copy)]
pub struct SchemeConfig {
    pub bdf: BdfParams,
    pub stab: Stabilization,
    pub solve: SolveOpts,
    /// A run is declared blown up when the energy exceeds this multiple of
    /// the (positive) initial energy.
    pub blowup_factor: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            bdf: BdfParams::default(),
            stab: Stabilization::default(),
            solve: SolveOpts::default(),
            blowup_factor: 10.0,
        }
    }
}

/// Bound problem + grid + scheme configuration; the unit that knows how to
/// advance the state.
pub struct Stepper<'a> {
    pub spec: &'a ProblemSpec,
    pub grid: Grid,
    pub cfg: SchemeConfig,
    pub cst: GsavConstants,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a ProblemSpec, grid: Grid, cfg: SchemeConfig) -> Result<Self, Error> {
        let cst = spec.constants()?;
        Ok(Stepper {
            spec,
            grid,
            cfg,
            cst,
        })
    }

    /// Implicit Laplacian coefficient of the velocity solve, including the
    /// stabilization's implicit share.
    fn velocity_shift(&self, tau: f64) -> (f64, f64) {
        let k = self.cfg.bdf.k;
        let sigma = 2.0 * k + 1.0;
        let h = self.grid.h_min();
        let c_stab = match self.cfg.stab.kind {
            StabKind::None => 0.0,
            StabKind::Sa => 2.0 * tau * self.cfg.stab.cs * h * (2.0 * k + 1.0),
            StabKind::Sb => 2.0 * tau * self.cfg.stab.cs * h,
        };
        (sigma, 2.0 * tau * self.spec.nu * k + c_stab)
    }

    /// Temperature solve: `(2l+1 - 2 tau kappa l lap) theta^{n+1} = rhs`,
    /// with the advecting velocity and the advected temperature both
    /// extrapolated by `delta^{l+1}` and the source evaluated at `t^{n+l}`.
    pub fn step_temperature(
        &self,
        hist: &History,
        tau: f64,
        t_n: f64,
    ) -> Result<(ScalarField, SolveStats), Error> {
        let l = self.cfg.bdf.l;
        let kappa = self.spec.kappa;
        let adv_u = extrap_vec(&hist.u.0, &hist.u.1, l + 1.0);
        let adv_th = extrap(&hist.theta.0, &hist.theta.1, l + 1.0);

        // expanding -2 tau kappa lap(delta^l theta^{n+1}) leaves
        // -2 tau kappa (l-1) lap theta^n on the right-hand side
        let mut rhs = hist.theta.0.scale(4.0 * l);
        rhs = rhs.add_scaled(-(2.0 * l - 1.0), &hist.theta.1);
        if (l - 1.0).abs() > 0.0 {
            rhs = rhs.add_scaled(-2.0 * tau * kappa * (l - 1.0), &laplacian(&hist.theta.0));
        }
        rhs = rhs.add_scaled(-2.0 * tau, &advect(&adv_u, &adv_th));
        rhs = rhs.add_scaled(2.0 * tau, &self.spec.sample_g(t_n + l * tau, self.grid));

        solve_shifted(
            2.0 * l + 1.0,
            2.0 * tau * kappa * l,
            &rhs,
            self.spec.theta_bc,
            Some(&hist.theta.0),
            &self.cfg.solve,
        )
    }

    /// Velocity solve for the unscaled `u_bar^{n+1}`, componentwise. The
    /// nonlinearity, pressure gradient, and temperature coupling all enter
    /// through `delta^{k+1}` extrapolations of the *scaled* history.
    pub fn step_velocity(
        &self,
        hist: &History,
        tau: f64,
        t_n: f64,
    ) -> Result<(VectorField, SolveStats, SolveStats), Error> {
        let k = self.cfg.bdf.k;
        let nu = self.spec.nu;
        let (sigma, c) = self.velocity_shift(tau);

        let adv_w = extrap_vec(&hist.u.0, &hist.u.1, k + 1.0);
        let advection = advect_vec(&adv_w, &adv_w);
        let p_ext = extrap(&hist.p.0, &hist.p.1, k + 1.0);
        let grad_p = gradient(&p_ext);
        let th_ext = extrap(&hist.theta.0, &hist.theta.1, k + 1.0);
        let f2v = self.spec.f2_field(&th_ext);
        let f1v = self.spec.sample_f1(t_n + k * tau, self.grid);

        // as in the temperature solve, the explicit share of the
        // delta^k-extrapolated diffusion enters negatively
        let mut rhs = hist.u_bar.0.scale(4.0 * k);
        rhs = rhs.add_scaled(-(2.0 * k - 1.0), &hist.u_bar.1);
        if (k - 1.0).abs() > 0.0 {
            rhs = rhs.add_scaled(-2.0 * tau * nu * (k - 1.0), &laplacian_vec(&hist.u_bar.0));
        }
        rhs = rhs.add_scaled(-2.0 * tau, &advection);
        rhs = rhs.add_scaled(-2.0 * tau, &grad_p);
        rhs = rhs.add_scaled(2.0 * tau, &f1v);
        rhs = rhs.add_scaled(2.0 * tau, &f2v);

        let h = self.grid.h_min();
        match self.cfg.stab.kind {
            StabKind::None => {}
            StabKind::Sa => {
                // explicit share of S_a: the D^k history terms
                let hist_comb = hist
                    .u
                    .0
                    .scale(4.0 * k)
                    .add_scaled(-(2.0 * k - 1.0), &hist.u.1);
                rhs = rhs.add_scaled(
                    -2.0 * tau * self.cfg.stab.cs * h,
                    &laplacian_vec(&hist_comb),
                );
            }
            StabKind::Sb => {
                rhs = rhs.add_scaled(-2.0 * tau * self.cfg.stab.cs * h, &laplacian_vec(&hist.u.1));
            }
        }

        let (ux, st_x) = solve_shifted(
            sigma,
            c,
            &rhs.x,
            BcKind::DirichletZero,
            Some(&hist.u_bar.0.x),
            &self.cfg.solve,
        )?;
        let (uy, st_y) = solve_shifted(
            sigma,
            c,
            &rhs.y,
            BcKind::DirichletZero,
            Some(&hist.u_bar.0.y),
            &self.cfg.solve,
        )?;
        Ok((VectorField { x: ux, y: uy }, st_x, st_y))
    }

    /// Pressure correction: `-lap psi = -(1/(2 tau)) div D^k u_bar^{n+1}`
    /// with Neumann data and zero mean.
    pub fn compute_psi(
        &self,
        u_bar_new: &VectorField,
        hist: &History,
        tau: f64,
        guess: Option<&ScalarField>,
    ) -> Result<(ScalarField, SolveStats), Error> {
        let k = self.cfg.bdf.k;
        let dku = bdf_comb_vec(u_bar_new, &hist.u_bar.0, &hist.u_bar.1, k);
        let rhs = divergence(&dku).scale(-1.0 / (2.0 * tau));
        solve_poisson_neumann(&rhs, guess, &self.cfg.solve)
    }

    /// Pressure recursion:
    /// `p^{n+1} = (k-1)/k p^n - nu div(u_bar^{n+1} - (k-1)/k u_bar^n)
    ///            + 1/k delta^{k+1} p^n + 1/k psi^{n+1}`,
    /// mean-zero projected.
    pub fn pressure_update(
        &self,
        hist: &History,
        u_bar_new: &VectorField,
        psi: &ScalarField,
    ) -> ScalarField {
        let k = self.cfg.bdf.k;
        let ratio = (k - 1.0) / k;
        let div_arg = u_bar_new.add_scaled(-ratio, &hist.u_bar.0);
        let delta_p = extrap(&hist.p.0, &hist.p.1, k + 1.0);
        let mut p = hist.p.0.scale(ratio);
        p = p.add_scaled(-self.spec.nu, &divergence(&div_arg));
        p = p.add_scaled(1.0 / k, &delta_p);
        p = p.add_scaled(1.0 / k, psi);
        mean_zero_project(&p)
    }

    /// One full step `n -> n+1`: temperature, velocity, correction,
    /// pressure, auxiliary update, velocity rescale, history rotation.
    pub fn full_step(
        &self,
        hist: &History,
        gsav: &GsavState,
        tau: f64,
        t_n: f64,
        step_index: usize,
        psi_guess: Option<&ScalarField>,
    ) -> Result<(History, GsavState, StepReport, ScalarField), Error> {
        let (theta_new, st_theta) = self.step_temperature(hist, tau, t_n)?;
        let (u_bar_new, st_ux, st_uy) = self.step_velocity(hist, tau, t_n)?;
        let (psi, st_psi) = self.compute_psi(&u_bar_new, hist, tau, psi_guess)?;
        let p_new = self.pressure_update(hist, &u_bar_new, &psi);

        let t_new = t_n + tau;
        let e_new = energy(&theta_new, &u_bar_new, &self.cst);
        let f_now = self
            .spec
            .sample_f1(t_new, self.grid)
            .add_scaled(1.0, &self.spec.f2_field(&theta_new));
        let g_now = self.spec.sample_g(t_new, self.grid);
        let dedt = energy_rate(
            &theta_new,
            &u_bar_new,
            &f_now,
            &g_now,
            self.spec.nu,
            self.spec.kappa,
            &self.cst,
        )?;
        let r_new = update_r(gsav.r, e_new, dedt, tau, &self.cst);
        let (xi, eta) = compute_xi_eta(r_new, e_new, &self.cst);
        let u_new = u_bar_new.scale(eta);
        let div_norm = norm_l2(&divergence(&u_bar_new));

        let report = StepReport {
            step: step_index,
            t: t_new,
            energy: e_new,
            r: r_new,
            xi,
            eta,
            div_norm,
            solver: SubSolveStats {
                theta: st_theta,
                ux: st_ux,
                uy: st_uy,
                psi: st_psi,
            },
        };
        let new_hist = History {
            theta: (theta_new, hist.theta.0.clone()),
            u_bar: (u_bar_new, hist.u_bar.0.clone()),
            u: (u_new, hist.u.0.clone()),
            p: (p_new, hist.p.0.clone()),
        };
        Ok((new_hist, GsavState { r: r_new, xi, eta }, report, psi))
    }

    /// Produce the `n = 1` level the two-level recurrence needs.
    ///
    /// Mode A (exact solution available): copy the exact snapshots at
    /// `t = tau`. Mode B: 16 substeps of a first-order semi-implicit scheme
    /// (implicit diffusion, explicit advection and forcing, pressure via one
    /// Neumann-Poisson correction per substep), giving a locally
    /// second-order state at `t = tau`.
    ///
    /// The auxiliary variable starts at `r = E(theta^1, u_bar^1) + C_bar`
    /// with `xi = eta = 1`.
    pub fn bootstrap(&self, tau: f64) -> Result<BootstrapResult, Error> {
        let (theta0, u0, p0) = self.spec.initial_fields(self.grid);
        let e0 = energy(&theta0, &u0, &self.cst);

        let (theta1, u1, p1) = if self.spec.exact.is_some() {
            let theta1 = self.spec.exact_theta(tau, self.grid).unwrap();
            let u1 = self.spec.exact_u(tau, self.grid).unwrap();
            let p1 = mean_zero_project(&self.spec.exact_p(tau, self.grid).unwrap());
            (theta1, u1, p1)
        } else {
            self.bootstrap_substeps(&theta0, &u0, &p0, tau)?
        };

        let e1 = energy(&theta1, &u1, &self.cst);
        let gsav = GsavState::at_energy(e1, &self.cst);
        let report = StepReport {
            step: 1,
            t: tau,
            energy: e1,
            r: gsav.r,
            xi: 1.0,
            eta: 1.0,
            div_norm: norm_l2(&divergence(&u1)),
            solver: SubSolveStats::default(),
        };
        let history = History {
            theta: (theta1, theta0),
            u_bar: (u1.clone(), u0.clone()),
            u: (u1, u0),
            p: (p1, mean_zero_project(&p0)),
        };
        Ok(BootstrapResult {
            history,
            gsav,
            report,
            initial_energy: e0,
        })
    }

    fn bootstrap_substeps(
        &self,
        theta0: &ScalarField,
        u0: &VectorField,
        p0: &ScalarField,
        tau: f64,
    ) -> Result<(ScalarField, VectorField, ScalarField), Error> {
        const SUBSTEPS: usize = 16;
        let dt = tau / SUBSTEPS as f64;
        let nu = self.spec.nu;
        let kappa = self.spec.kappa;

        let mut theta = theta0.clone();
        let mut u = u0.clone();
        let mut p = mean_zero_project(p0);
        for m in 0..SUBSTEPS {
            // forcing at the substep end keeps the implicit-Euler response
            // from lagging by one substep on stiff modes
            let t_next = (m + 1) as f64 * dt;

            let mut rhs_t = theta.add_scaled(-dt, &advect(&u, &theta));
            rhs_t = rhs_t.add_scaled(dt, &self.spec.sample_g(t_next, self.grid));
            let (theta_new, _) = solve_shifted(
                1.0,
                dt * kappa,
                &rhs_t,
                self.spec.theta_bc,
                Some(&theta),
                &self.cfg.solve,
            )?;

            let mut rhs_u = u.add_scaled(-dt, &advect_vec(&u, &u));
            rhs_u = rhs_u.add_scaled(-dt, &gradient(&p));
            rhs_u = rhs_u.add_scaled(dt, &self.spec.sample_f1(t_next, self.grid));
            rhs_u = rhs_u.add_scaled(dt, &self.spec.f2_field(&theta));
            let (ux, _) = solve_shifted(
                1.0,
                dt * nu,
                &rhs_u.x,
                BcKind::DirichletZero,
                Some(&u.x),
                &self.cfg.solve,
            )?;
            let (uy, _) = solve_shifted(
                1.0,
                dt * nu,
                &rhs_u.y,
                BcKind::DirichletZero,
                Some(&u.y),
                &self.cfg.solve,
            )?;
            let u_new = VectorField { x: ux, y: uy };

            // one psi-style correction: -lap psi = -(1/dt) div(u_new - u),
            // then the incremental velocity/pressure update in rotational
            // form (the velocity correction removes the gradient defect the
            // lagged pressure left behind)
            let rhs_psi = divergence(&u_new.add_scaled(-1.0, &u)).scale(-1.0 / dt);
            let (psi, _) = solve_poisson_neumann(&rhs_psi, None, &self.cfg.solve)?;
            let mut u_corr = u_new.add_scaled(-dt, &gradient(&psi));
            u_corr.x.enforce_bc();
            u_corr.y.enforce_bc();
            let mut p_new = p.add_scaled(1.0, &psi);
            p_new = p_new.add_scaled(-nu, &divergence(&u_corr));
            p = mean_zero_project(&p_new);
            theta = theta_new;
            u = u_corr;
        }
        Ok((theta, u, p))
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapResult {
    pub history: History,
    pub gsav: GsavState,
    pub report: StepReport,
    /// `E(theta^0, u^0)`: reference for the blow-up declaration.
    pub initial_energy: f64,
}

/// Observer of the run loop; receives every accepted state.
pub trait RunSink {
    fn on_state(&mut self, _step: usize, _t: f64, _hist: &History, _report: &StepReport) {}
}

/// Sink that ignores everything.
pub struct NullSink;

impl RunSink for NullSink {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// Blow-up or solver failure at this step; the reports up to the last
    /// finite state are retained.
    Diverged {
        step: usize,
    },
}

pub struct RunOutcome {
    pub reports: Vec<StepReport>,
    pub history: History,
    pub gsav: GsavState,
    pub status: RunStatus,
}

/// Bootstrap, then `N - 1` full steps with `N = T / tau` (which must divide
/// within rounding). Divergence (non-finite diagnostics, energy beyond
/// `blowup_factor` times a positive initial energy, or a failed solve) stops
/// the run and is reported in the outcome status.
pub fn run(
    spec: &ProblemSpec,
    grid: Grid,
    cfg: SchemeConfig,
    tau: f64,
    t_end: f64,
    sink: &mut dyn RunSink,
) -> Result<RunOutcome, Error> {
    if tau.is_nan() || tau <= 0.0 || t_end.is_nan() || t_end <= 0.0 {
        return Err(Error::InvalidParameter("tau and T must be positive".into()));
    }
    let n_steps = (t_end / tau).round() as usize;
    if n_steps < 2 || ((n_steps as f64) * tau - t_end).abs() > 1e-8 * t_end.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} must divide T = {t_end} into at least two steps"
        )));
    }

    let stepper = Stepper::new(spec, grid, cfg)?;
    let boot = stepper.bootstrap(tau)?;
    let e0 = boot.initial_energy;
    let mut hist = boot.history;
    let mut gsav = boot.gsav;
    let mut reports = vec![boot.report.clone()];
    sink.on_state(1, tau, &hist, &boot.report);

    let mut psi_prev: Option<ScalarField> = None;
    let mut status = RunStatus::Completed;
    for n in 1..n_steps {
        let t_n = n as f64 * tau;
        match stepper.full_step(&hist, &gsav, tau, t_n, n + 1, psi_prev.as_ref()) {
            Ok((h, g, rep, psi)) => {
                let blown = !rep.is_finite()
                    || (e0 > 0.0 && rep.energy > cfg.blowup_factor * e0)
                    || !h.u_bar.0.is_finite()
                    || !h.theta.0.is_finite()
                    || !h.p.0.is_finite();
                reports.push(rep.clone());
                hist = h;
                gsav = g;
                psi_prev = Some(psi);
                sink.on_state(n + 1, rep.t, &hist, &rep);
                if blown {
                    status = RunStatus::Diverged { step: n + 1 };
                    break;
                }
            }
            Err(Error::SolveFailed { .. }) => {
                status = RunStatus::Diverged { step: n + 1 };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutcome {
        reports,
        history: hist,
        gsav,
        status,
    })
}
