//! Standalone numerical verification of the scheme's algebraic backbone:
//! the exact factorization identities behind the `D^k`/`delta^k` energy
//! estimates, the inequality forms derived from them, and the consistency
//! orders of the two sequence operators.
//!
//! The identities are exact, so they are tested at machine precision and the
//! inequalities follow by dropping nonnegative terms; this localizes a
//! transcription error much more sharply than fuzzing the inequalities
//! alone. Sampling is seeded and the seed is recorded in the output.

use crate::error::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Constants of the two factorization identities for a given `k` (and
/// `epsilon` for the extrapolation identity).
///
/// `D^k`-identity family: `a = 3/(2(k+1))`, `c = sqrt(k^2 + k/2 - 1/2)`,
/// `b = (k^2 + 3k/2 - 1)/c`, `d = c^2`.
///
/// `delta^k`-identity family: `a_hat = (4k^2 - 1 - eps)/(2k+1)^2`,
/// `b_hat = (k + 1/2 - k(k+1) eps)/(2k+1)^2`,
/// `d_hat = (k + 1/2 - eps k)/(2k+1)`, `f_hat = eps`. Note `b_hat` turns
/// negative for large `eps` at small `k`; the inequality form can then no
/// longer drop the `b_hat` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationConstants {
    pub k: f64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub a_hat: f64,
    pub b_hat: f64,
    pub d_hat: f64,
    pub f_hat: f64,
}

/// Evaluate the factorization constants. `k >= 1/2` is required (below that
/// `c^2` goes negative); at exactly `k = 1/2` both `c` and the numerator of
/// `b` vanish and `b = 0` is the consistent limit.
pub fn constants_for(k: f64, epsilon: f64) -> Result<FactorizationConstants, Error> {
    if k.is_nan() || k < 0.5 {
        return Err(Error::InvalidParameter(format!(
            "factorization constants hold for k >= 1/2 (got k={k})"
        )));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter("epsilon must be >= 0".into()));
    }
    let c2 = k * k + 0.5 * k - 0.5;
    let c = c2.max(0.0).sqrt();
    let b_num = k * k + 1.5 * k - 1.0;
    let b = if c > 0.0 { b_num / c } else { 0.0 };
    let a = 1.5 / (k + 1.0);
    let two_k1 = 2.0 * k + 1.0;
    let a_hat = (4.0 * k * k - 1.0 - epsilon) / (two_k1 * two_k1);
    let b_hat = (k + 0.5 - k * (k + 1.0) * epsilon) / (two_k1 * two_k1);
    let d_hat = (k + 0.5 - epsilon * k) / two_k1;
    Ok(FactorizationConstants {
        k,
        epsilon,
        a,
        b,
        c,
        d: c2,
        a_hat,
        b_hat,
        d_hat,
        f_hat: epsilon,
    })
}

/// Residual and inequality slack of one identity evaluation. The residual is
/// normalized by the magnitude of the participating terms.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub residual: f64,
    /// `LHS - RHS_inequality`, where the inequality RHS drops the terms that
    /// are manifestly nonnegative. Should never fall below `-1e-12`.
    pub slack: f64,
}

/// Check the exact identity
/// `<D^k v^{n+1}, delta^{k+1} v^{n+1}> = a (|v2|^2 - |v1|^2)
///   + |b v2 - c v1|^2 - |b v1 - c v0|^2 + d |v2 - 2 v1 + v0|^2
///   + 2 |v2 - v1|^2`
/// on a scalar triple `(v0, v1, v2) = (v^{n-1}, v^n, v^{n+1})`.
pub fn check_bdf_factorization_equality(k: f64, v: [f64; 3]) -> Result<IdentityCheck, Error> {
    let cst = constants_for(k, 0.0)?;
    let [v0, v1, v2] = v;
    let dk = (2.0 * k + 1.0) * v2 - 4.0 * k * v1 + (2.0 * k - 1.0) * v0;
    let delta_k1 = (k + 1.0) * v2 - k * v1;
    let lhs = dk * delta_k1;

    let sq = |x: f64| x * x;
    let term_a = cst.a * (sq(v2) - sq(v1));
    let term_bc = sq(cst.b * v2 - cst.c * v1) - sq(cst.b * v1 - cst.c * v0);
    let term_d = cst.d * sq(v2 - 2.0 * v1 + v0);
    let term_2 = 2.0 * sq(v2 - v1);
    let rhs = term_a + term_bc + term_d + term_2;

    let scale = lhs
        .abs()
        .max(term_a.abs())
        .max(term_bc.abs())
        .max(term_d.abs())
        .max(term_2.abs())
        .max(1.0);
    Ok(IdentityCheck {
        residual: (lhs - rhs).abs() / scale,
        // the d- and 2-norm terms are nonnegative, so dropping them can only
        // lower the RHS
        slack: (lhs - (term_a + term_bc)) / scale,
    })
}

/// Check the exact identity
/// `<delta^k v^{n+1}, delta^{k+1} v^{n+1}> = a_hat |delta^{k+1} v^{n+1}|^2
///   + b_hat |v2 + v1|^2 + (d_hat + f_hat) |v2|^2 - d_hat |v1|^2`
/// on a scalar pair `(v1, v2) = (v^n, v^{n+1})`.
pub fn check_extrap_factorization_equality(
    k: f64,
    epsilon: f64,
    v: [f64; 2],
) -> Result<IdentityCheck, Error> {
    let cst = constants_for(k, epsilon)?;
    let [v1, v2] = v;
    let delta_k = k * v2 - (k - 1.0) * v1;
    let delta_k1 = (k + 1.0) * v2 - k * v1;
    let lhs = delta_k * delta_k1;

    let sq = |x: f64| x * x;
    let term_a = cst.a_hat * sq(delta_k1);
    let term_b = cst.b_hat * sq(v2 + v1);
    let term_df = (cst.d_hat + cst.f_hat) * sq(v2) - cst.d_hat * sq(v1);
    let rhs = term_a + term_b + term_df;

    let scale = lhs
        .abs()
        .max(term_a.abs())
        .max(term_b.abs())
        .max(term_df.abs())
        .max(1.0);
    // only drop the b_hat term when it is in fact nonnegative
    let dropped = if cst.b_hat >= 0.0 { term_b } else { 0.0 };
    Ok(IdentityCheck {
        residual: (lhs - rhs).abs() / scale,
        slack: (lhs - (rhs - dropped)) / scale,
    })
}

/// Order estimate of a remainder sum under time-step halving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Least-squares slope of `log2(S)` against the refinement level.
    Fitted(f64),
    /// The remainder vanished to rounding at every level (e.g. the
    /// extrapolation remainder for `k = 1`, where `delta^1` is the
    /// identity); stronger than any finite order.
    ExactZero,
}

impl OrderEstimate {
    pub fn as_f64(&self) -> f64 {
        match self {
            OrderEstimate::Fitted(p) => *p,
            OrderEstimate::ExactZero => f64::INFINITY,
        }
    }
}

/// Remainder sums of the two sequence operators for one (`k`, `tau`):
/// `S_zeta = sum_n |delta^k v(t^{n+1}) - v(t^{n+k})|^2` and
/// `S_xi = sum_n |D^k v(t^{n+1}) - 2 tau v'(t^{n+k})|^2`.
pub fn consistency_sums(
    v: &dyn Fn(f64) -> f64,
    dv: &dyn Fn(f64) -> f64,
    k: f64,
    t_end: f64,
    tau: f64,
) -> (f64, f64) {
    let n_steps = (t_end / tau).round() as usize;
    let t = |n: usize| n as f64 * tau;
    let mut s_zeta = 0.0;
    for n in 0..n_steps {
        let zeta = k * v(t(n + 1)) - (k - 1.0) * v(t(n)) - v(t(n) + k * tau);
        s_zeta += zeta * zeta;
    }
    let mut s_xi = 0.0;
    for n in 1..n_steps {
        let dk = (2.0 * k + 1.0) * v(t(n + 1)) - 4.0 * k * v(t(n)) + (2.0 * k - 1.0) * v(t(n - 1));
        let xi = dk - 2.0 * tau * dv(t(n) + k * tau);
        s_xi += xi * xi;
    }
    (s_zeta, s_xi)
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub k: f64,
    pub taus: Vec<f64>,
    pub s_zeta: Vec<f64>,
    pub s_xi: Vec<f64>,
    /// Expected ~3 (each remainder is O(tau^2), summed over O(1/tau) steps).
    pub zeta_order: OrderEstimate,
    /// Expected ~5.
    pub xi_order: OrderEstimate,
}

fn fit_order(taus: &[f64], sums: &[f64]) -> OrderEstimate {
    if sums.iter().all(|s| *s < 1e-25) {
        return OrderEstimate::ExactZero;
    }
    // least-squares slope of log2 S against log2 tau
    let xs: Vec<f64> = taus.iter().map(|t| t.log2()).collect();
    let ys: Vec<f64> = sums.iter().map(|s| s.max(1e-300).log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    OrderEstimate::Fitted(cov / var)
}

/// Run the remainder sums over a ladder of halved time steps and fit the
/// observed orders.
pub fn consistency_orders(
    v: &dyn Fn(f64) -> f64,
    dv: &dyn Fn(f64) -> f64,
    k: f64,
    t_end: f64,
    taus: &[f64],
) -> ConsistencyReport {
    let mut s_zeta = Vec::with_capacity(taus.len());
    let mut s_xi = Vec::with_capacity(taus.len());
    for &tau in taus {
        let (sz, sx) = consistency_sums(v, dv, k, t_end, tau);
        s_zeta.push(sz);
        s_xi.push(sx);
    }
    ConsistencyReport {
        k,
        taus: taus.to_vec(),
        zeta_order: fit_order(taus, &s_zeta),
        xi_order: fit_order(taus, &s_xi),
        s_zeta,
        s_xi,
    }
}

/// One row of the verification report: worst-case identity residuals and
/// inequality slacks over the random samples, plus the `a_hat` value and the
/// consistency orders for this `k`.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub k: f64,
    pub epsilon: f64,
    pub max_residual_bdf: f64,
    pub max_residual_extrap: f64,
    pub min_slack_bdf: f64,
    pub min_slack_extrap: f64,
    pub a_hat: f64,
    pub zeta_order: OrderEstimate,
    pub xi_order: OrderEstimate,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<VerifyRow>,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.max_residual_bdf.max(r.max_residual_extrap))
            .fold(0.0, f64::max)
    }

    pub fn min_slack(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.min_slack_bdf.min(r.min_slack_extrap))
            .fold(f64::MAX, f64::min)
    }
}

pub const DEFAULT_VERIFY_KS: [f64; 7] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5];

/// Run the full verification sweep: for each `k` both `epsilon = 0` and
/// `epsilon = 1/k^2`, `samples` seeded random triples/pairs in `[-1, 1]`,
/// and the consistency-order fits with `v(t) = sin t` on `[0, pi]`.
pub fn run_verification(seed: u64, samples: usize) -> Result<VerificationReport, Error> {
    let t_end = std::f64::consts::PI;
    let taus: Vec<f64> = (0..5).map(|i| t_end / 2f64.powi(i + 4)).collect();
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &k in DEFAULT_VERIFY_KS.iter() {
        let orders = consistency_orders(&|t: f64| t.sin(), &|t: f64| t.cos(), k, t_end, &taus);
        for epsilon in [0.0, 1.0 / (k * k)] {
            let cst = constants_for(k, epsilon)?;
            let mut row = VerifyRow {
                k,
                epsilon,
                max_residual_bdf: 0.0,
                max_residual_extrap: 0.0,
                min_slack_bdf: f64::MAX,
                min_slack_extrap: f64::MAX,
                a_hat: cst.a_hat,
                zeta_order: orders.zeta_order,
                xi_order: orders.xi_order,
            };
            for _ in 0..samples {
                let triple = [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ];
                let chk = check_bdf_factorization_equality(k, triple)?;
                row.max_residual_bdf = row.max_residual_bdf.max(chk.residual);
                row.min_slack_bdf = row.min_slack_bdf.min(chk.slack);
                let pair = [triple[0], triple[1]];
                let chk = check_extrap_factorization_equality(k, epsilon, pair)?;
                row.max_residual_extrap = row.max_residual_extrap.max(chk.residual);
                row.min_slack_extrap = row.min_slack_extrap.min(chk.slack);
            }
            rows.push(row);
        }
    }
    Ok(VerificationReport {
        seed,
        samples,
        rows,
    })
}
