//! Command-line interface: benchmark runs, the convergence study, and the
//! algebraic verification sweep.
//!
//! Exit codes: 0 on success, 1 on usage/config errors, 2 when a run
//! diverges or a solve fails.

use crate::error::Error;
use crate::grid::Grid;
use crate::harness::{
    error_table_to_csv, manufactured_spec, marsigli_spec, reports_to_csv, run_convergence_study,
    run_k_study, shear_layer_spec, verify_to_csv, write_error_table_csv, write_reports_csv,
    write_verify_csv, write_vtk, Config, ProblemSpec, StudyOptions,
};
use crate::linsolve::SolveOpts;
use crate::operators::BdfParams;
use crate::stepper::{
    run, History, RunSink, RunStatus, SchemeConfig, StabKind, Stabilization, StepReport,
};
use crate::verify::run_verification;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "bouss2d",
    about = "2D incompressible Boussinesq solver (GSAV-BDF(k) consistent splitting)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Grid nodes in x (boundary included)
    #[arg(long)]
    nx: Option<usize>,
    /// Grid nodes in y (boundary included)
    #[arg(long)]
    ny: Option<usize>,
    /// Time step
    #[arg(long)]
    tau: Option<f64>,
    /// End time
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Velocity extrapolation width (real, >= 1)
    #[arg(long)]
    k: Option<f64>,
    /// Temperature extrapolation width (real, >= 1)
    #[arg(long)]
    l: Option<f64>,
    /// Spatial stabilization: none | sa | sb
    #[arg(long)]
    stab: Option<String>,
    /// Stabilization scale c_s
    #[arg(long)]
    cs: Option<f64>,
    /// Output directory (reports CSV, optional VTK snapshots)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a VTK snapshot every N steps (0 = never)
    #[arg(long, default_value_t = 0)]
    vtk_every: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run described by a config file
    Run { config: PathBuf },
    /// Manufactured-solution temporal convergence study
    Converge {
        /// Number of tau-halving refinement levels
        #[arg(long, default_value_t = 5)]
        refinements: usize,
        /// Square-grid nodes per direction
        #[arg(long, default_value_t = 129)]
        nx: usize,
        /// Skip the spatial-floor check (no grid auto-doubling)
        #[arg(long, default_value_t = false)]
        no_floor_check: bool,
        /// Also run the fixed-step error-vs-k comparison
        #[arg(long, default_value_t = false)]
        k_study: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Marsigli lock-exchange benchmark
    Marsigli {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Double shear layer benchmark
    Shear {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Verify the factorization identities and consistency orders
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct StreamSink<'a> {
    spec: &'a ProblemSpec,
    out: Option<PathBuf>,
    vtk_every: usize,
}

impl RunSink for StreamSink<'_> {
    fn on_state(&mut self, step: usize, t: f64, hist: &History, _report: &StepReport) {
        if self.vtk_every > 0 && step.is_multiple_of(self.vtk_every) {
            if let Some(dir) = &self.out {
                let path = dir.join(format!("{}_{step:06}.vtk", self.spec.name));
                let title = format!("{} t={t}", self.spec.name);
                if let Err(e) = write_vtk(&title, &hist.theta.0, &hist.p.0, &hist.u.0, &path) {
                    eprintln!("warning: vtk write failed: {e}");
                }
            }
        }
    }
}

fn benchmark(
    spec: &ProblemSpec,
    flags: &RunFlags,
    default_grid: (usize, usize),
) -> Result<i32, Error> {
    let nx = flags.nx.unwrap_or(default_grid.0);
    let ny = flags.ny.unwrap_or(default_grid.1);
    let grid = Grid::new(
        spec.domain.x0,
        spec.domain.y0,
        spec.domain.lx,
        spec.domain.ly,
        nx,
        ny,
    );
    let tau = flags.tau.unwrap_or(1e-3);
    let t_end = flags.t_end.unwrap_or(spec.default_t_end);
    let stab_kind = match flags.stab.as_deref() {
        None | Some("none") => StabKind::None,
        Some("sa") => StabKind::Sa,
        Some("sb") => StabKind::Sb,
        Some(other) => {
            return Err(Error::Config(format!("unknown stabilization `{other}`")));
        }
    };
    let cfg = SchemeConfig {
        bdf: BdfParams::new(flags.k.unwrap_or(3.0), flags.l.unwrap_or(1.0))?,
        stab: Stabilization::new(stab_kind, flags.cs.unwrap_or(0.5))?,
        solve: SolveOpts::default(),
        blowup_factor: 10.0,
    };
    if !cfg.bdf.in_proven_regime() {
        eprintln!(
            "note: k = {} is outside the proven second-order regime (k >= 3)",
            cfg.bdf.k
        );
    }

    let mut sink = StreamSink {
        spec,
        out: flags.out.clone(),
        vtk_every: flags.vtk_every,
    };
    let outcome = run(spec, grid, cfg, tau, t_end, &mut sink)?;
    if let Some(dir) = &flags.out {
        write_reports_csv(
            &outcome.reports,
            &dir.join(format!("{}_reports.csv", spec.name)),
        )?;
    } else {
        print!("{}", reports_to_csv(&outcome.reports));
    }
    match outcome.status {
        RunStatus::Completed => Ok(0),
        RunStatus::Diverged { step } => {
            let last = outcome.reports.last().unwrap();
            eprintln!(
                "run diverged at step {step} (t = {:.6}): energy = {:.6e}, r = {:.6e}",
                last.t, last.energy, last.r
            );
            Ok(2)
        }
    }
}

fn run_from_config(path: &std::path::Path) -> Result<i32, Error> {
    let file_cfg = Config::from_file(path)?;
    let (spec, scheme) = file_cfg.build()?;
    let flags = RunFlags {
        nx: Some(file_cfg.nx),
        ny: Some(file_cfg.ny),
        tau: Some(file_cfg.tau),
        t_end: Some(file_cfg.t_end.unwrap_or(spec.default_t_end)),
        k: Some(scheme.bdf.k),
        l: Some(scheme.bdf.l),
        stab: Some(file_cfg.stab.clone()),
        cs: Some(scheme.stab.cs),
        out: file_cfg.out_dir.clone().map(PathBuf::from),
        vtk_every: file_cfg.vtk_every,
    };
    benchmark(&spec, &flags, (file_cfg.nx, file_cfg.ny))
}

fn converge(
    refinements: usize,
    nx: usize,
    no_floor_check: bool,
    k_study: bool,
    out: Option<&PathBuf>,
) -> Result<i32, Error> {
    let spec = manufactured_spec();
    let cfg = SchemeConfig::default();
    let opts = StudyOptions {
        refinements,
        grid_nodes: nx,
        check_spatial_floor: !no_floor_check,
        ..StudyOptions::default()
    };
    let table = run_convergence_study(&spec, cfg, spec.default_t_end, &opts)?;
    let csv = error_table_to_csv(&table);
    match out {
        Some(dir) => write_error_table_csv(&table, &dir.join("convergence.csv"))?,
        None => print!("{csv}"),
    }
    if k_study {
        let tau = spec.default_t_end / 2f64.powi(7);
        let rows = run_k_study(
            &spec,
            cfg,
            spec.default_t_end,
            tau,
            opts.grid_nodes,
            &[3.0, 5.0, 9.0],
        )?;
        println!("# error_theta vs k at tau = T/2^7");
        println!("k,err_theta");
        for (k, err) in &rows {
            println!("{k},{err:.16e}");
        }
        if rows.first().map(|r| r.1) > rows.last().map(|r| r.1) {
            eprintln!("warning: theta error not monotone in k (k=3 worse than k=9)");
        }
    }
    if table.rows.iter().any(|r| r.diverged) {
        return Ok(2);
    }
    Ok(0)
}

fn verify(seed: u64, samples: usize, out: Option<&PathBuf>) -> Result<i32, Error> {
    let report = run_verification(seed, samples)?;
    match out {
        Some(dir) => write_verify_csv(&report, &dir.join("verify.csv"))?,
        None => print!("{}", verify_to_csv(&report)),
    }
    let ok = report.max_residual() <= 1e-12 && report.min_slack() >= -1e-12;
    if !ok {
        eprintln!(
            "verification FAILED: max residual {:.3e}, min slack {:.3e}",
            report.max_residual(),
            report.min_slack()
        );
        return Ok(2);
    }
    Ok(0)
}

/// Parse `args` and dispatch; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own rendering (help/version go to stdout, errors to
            // stderr); usage problems exit 1 per the interface contract
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 1 };
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run_from_config(config),
        Command::Converge {
            refinements,
            nx,
            no_floor_check,
            k_study,
            out,
        } => converge(*refinements, *nx, *no_floor_check, *k_study, out.as_ref()),
        Command::Marsigli { flags } => benchmark(&marsigli_spec(), flags, (129, 17)),
        Command::Shear { flags } => benchmark(&shear_layer_spec(), flags, (65, 65)),
        Command::Verify { seed, samples, out } => verify(*seed, *samples, out.as_ref()),
    };
    match result {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::InvalidParameter(_))) => {
            eprintln!("error: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
