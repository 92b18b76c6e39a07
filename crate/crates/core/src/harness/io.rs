//! CSV diagnostics and legacy-VTK field output.
//!
//! CSV files carry full double precision (17 significant digits), LF line
//! endings, and `.` decimal separators, so written values parse back
//! bit-identically. VTK files are legacy ASCII `STRUCTURED_POINTS` with the
//! temperature and pressure as scalars and the velocity as a 3-padded
//! vector.

use crate::error::Error;
use crate::grid::{ScalarField, VectorField};
use crate::harness::ErrorTable;
use crate::stepper::StepReport;
use crate::verify::VerificationReport;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Step-report CSV: `t,E,r,xi,eta,div_norm`, one record per accepted
/// step.
pub fn reports_to_csv(reports: &[StepReport]) -> String {
    let mut s = String::from("t,E,r,xi,eta,div_norm\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.energy),
            fmt_f64(r.r),
            fmt_f64(r.xi),
            fmt_f64(r.eta),
            fmt_f64(r.div_norm),
        );
    }
    s
}

pub fn write_reports_csv(reports: &[StepReport], path: &Path) -> Result<(), Error> {
    write_file(path, &reports_to_csv(reports))
}

/// Parse back what [`reports_to_csv`] wrote; the round trip is exact.
pub fn parse_reports_csv(text: &str) -> Result<Vec<[f64; 6]>, Error> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Config(format!(
                "reports csv line {}: expected 6 columns",
                i + 1
            )));
        }
        let mut vals = [0.0; 6];
        for (j, c) in cols.iter().enumerate() {
            vals[j] = c
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("line {}: bad float `{c}`", i + 1)))?;
        }
        out.push(vals);
    }
    Ok(out)
}

/// Error-table CSV with the ratio columns recomputed from the stored
/// errors. Metadata rides along in `#`-comment lines.
pub fn error_table_to_csv(table: &ErrorTable) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# grid = {}x{} nodes, T = {}, nu = {}, kappa = {}, k = {}, l = {}, grid_doubled = {}",
        table.grid_nodes.0,
        table.grid_nodes.1,
        fmt_f64(table.t_end),
        fmt_f64(table.nu),
        fmt_f64(table.kappa),
        fmt_f64(table.k),
        fmt_f64(table.l),
        table.grid_doubled,
    );
    s.push_str(
        "i,tau,err_ubar,ratio_ubar,err_u,ratio_u,err_p,ratio_p,err_theta,ratio_theta,\
         max_eta_dev,max_div_norm,diverged\n",
    );
    let ratios = table.ratios();
    for (row, ratio) in table.rows.iter().zip(ratios) {
        let fmt_ratio = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let (rub, ru, rp, rth) = match ratio {
            Some((a, b, c, d)) => (Some(a), Some(b), Some(c), Some(d)),
            None => (None, None, None, None),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.refinement,
            fmt_f64(row.tau),
            fmt_f64(row.err_u_bar),
            fmt_ratio(rub),
            fmt_f64(row.err_u),
            fmt_ratio(ru),
            fmt_f64(row.err_p),
            fmt_ratio(rp),
            fmt_f64(row.err_theta),
            fmt_ratio(rth),
            fmt_f64(row.max_eta_dev),
            fmt_f64(row.max_div_norm),
            row.diverged,
        );
    }
    s
}

pub fn write_error_table_csv(table: &ErrorTable, path: &Path) -> Result<(), Error> {
    write_file(path, &error_table_to_csv(table))
}

/// Verification CSV: one row per `(k, epsilon)` with worst residuals,
/// slacks, `a_hat`, and the consistency-order fits for that `k`.
pub fn verify_to_csv(report: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# seed = {}, samples = {}", report.seed, report.samples);
    s.push_str(
        "k,epsilon,max_residual_bdf,max_residual_extrap,min_slack_bdf,min_slack_extrap,\
         a_hat,zeta_order,xi_order\n",
    );
    for row in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(row.k),
            fmt_f64(row.epsilon),
            fmt_f64(row.max_residual_bdf),
            fmt_f64(row.max_residual_extrap),
            fmt_f64(row.min_slack_bdf),
            fmt_f64(row.min_slack_extrap),
            fmt_f64(row.a_hat),
            fmt_f64(row.zeta_order.as_f64()),
            fmt_f64(row.xi_order.as_f64()),
        );
    }
    s
}

pub fn write_verify_csv(report: &VerificationReport, path: &Path) -> Result<(), Error> {
    write_file(path, &verify_to_csv(report))
}

/// Legacy ASCII VTK `STRUCTURED_POINTS` snapshot: `theta` and `p` as point
/// scalars, the velocity as a 3-component vector with zero third component.
pub fn vtk_to_string(title: &str, theta: &ScalarField, p: &ScalarField, u: &VectorField) -> String {
    let g = theta.grid();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", g.nx, g.ny);
    let _ = writeln!(s, "ORIGIN {} {} 0", g.x0, g.y0);
    let _ = writeln!(s, "SPACING {} {} 1", g.hx(), g.hy());
    let _ = writeln!(s, "POINT_DATA {}", g.len());
    s.push_str("SCALARS theta double 1\nLOOKUP_TABLE default\n");
    for v in theta.values() {
        let _ = writeln!(s, "{}", fmt_f64(*v));
    }
    s.push_str("SCALARS p double 1\nLOOKUP_TABLE default\n");
    for v in p.values() {
        let _ = writeln!(s, "{}", fmt_f64(*v));
    }
    s.push_str("VECTORS velocity double\n");
    for (vx, vy) in u.x.values().iter().zip(u.y.values()) {
        let _ = writeln!(s, "{} {} 0", fmt_f64(*vx), fmt_f64(*vy));
    }
    s
}

pub fn write_vtk(
    title: &str,
    theta: &ScalarField,
    p: &ScalarField,
    u: &VectorField,
    path: &Path,
) -> Result<(), Error> {
    write_file(path, &vtk_to_string(title, theta, p, u))
}
