//! Flat `key = value` config files with `[section]` headers. Every
//! physical and numerical parameter of a run is addressable; parsing and
//! serialization round-trip exactly.

use crate::error::Error;
use crate::harness::{manufactured_spec, marsigli_spec, shear_layer_spec, ProblemSpec};
use crate::linsolve::SolveOpts;
use crate::operators::BdfParams;
use crate::stepper::{SchemeConfig, StabKind, Stabilization};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    // [problem]
    pub kind: String,
    pub nu: Option<f64>,
    pub kappa: Option<f64>,
    // [grid]
    pub nx: usize,
    pub ny: usize,
    // [time]
    pub tau: f64,
    pub t_end: Option<f64>,
    // [scheme]
    pub k: f64,
    pub l: f64,
    pub stab: String,
    pub cs: f64,
    pub rtol: f64,
    pub blowup_factor: f64,
    // [gsav]
    pub alpha: Option<f64>,
    pub c_f1: f64,
    pub c_g: f64,
    // [output]
    pub out_dir: Option<String>,
    pub vtk_every: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            kind: "manufactured".into(),
            nu: None,
            kappa: None,
            nx: 129,
            ny: 129,
            tau: 1e-2,
            t_end: None,
            k: 3.0,
            l: 1.0,
            stab: "none".into(),
            cs: 0.5,
            rtol: 1e-10,
            blowup_factor: 10.0,
            alpha: None,
            c_f1: 0.0,
            c_g: 0.0,
            out_dir: None,
            vtk_every: 0,
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, Error> {
        let mut section = String::new();
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::Config(format!("line {}: unterminated section", lineno + 1))
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            map.insert(
                format!("{section}.{}", key.trim()),
                value.trim().to_string(),
            );
        }

        let mut cfg = Config::default();
        let mut take = |key: &str| map.remove(key);
        let parse_f64 = |key: &str, v: String| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: invalid number `{v}`")))
        };
        let parse_usize = |key: &str, v: String| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: invalid count `{v}`")))
        };

        if let Some(v) = take("problem.kind") {
            cfg.kind = v;
        }
        if let Some(v) = take("problem.nu") {
            cfg.nu = Some(parse_f64("problem.nu", v)?);
        }
        if let Some(v) = take("problem.kappa") {
            cfg.kappa = Some(parse_f64("problem.kappa", v)?);
        }
        if let Some(v) = take("grid.nx") {
            cfg.nx = parse_usize("grid.nx", v)?;
        }
        if let Some(v) = take("grid.ny") {
            cfg.ny = parse_usize("grid.ny", v)?;
        }
        if let Some(v) = take("time.tau") {
            cfg.tau = parse_f64("time.tau", v)?;
        }
        if let Some(v) = take("time.t_end") {
            cfg.t_end = Some(parse_f64("time.t_end", v)?);
        }
        if let Some(v) = take("scheme.k") {
            cfg.k = parse_f64("scheme.k", v)?;
        }
        if let Some(v) = take("scheme.l") {
            cfg.l = parse_f64("scheme.l", v)?;
        }
        if let Some(v) = take("scheme.stab") {
            cfg.stab = v;
        }
        if let Some(v) = take("scheme.cs") {
            cfg.cs = parse_f64("scheme.cs", v)?;
        }
        if let Some(v) = take("scheme.rtol") {
            cfg.rtol = parse_f64("scheme.rtol", v)?;
        }
        if let Some(v) = take("scheme.blowup_factor") {
            cfg.blowup_factor = parse_f64("scheme.blowup_factor", v)?;
        }
        if let Some(v) = take("gsav.alpha") {
            cfg.alpha = Some(parse_f64("gsav.alpha", v)?);
        }
        if let Some(v) = take("gsav.c_f1") {
            cfg.c_f1 = parse_f64("gsav.c_f1", v)?;
        }
        if let Some(v) = take("gsav.c_g") {
            cfg.c_g = parse_f64("gsav.c_g", v)?;
        }
        if let Some(v) = take("output.dir") {
            cfg.out_dir = Some(v);
        }
        if let Some(v) = take("output.vtk_every") {
            cfg.vtk_every = parse_usize("output.vtk_every", v)?;
        }
        if let Some(key) = map.keys().next() {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Config, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[problem]");
        let _ = writeln!(s, "kind = {}", self.kind);
        if let Some(nu) = self.nu {
            let _ = writeln!(s, "nu = {}", fmt_f64(nu));
        }
        if let Some(kappa) = self.kappa {
            let _ = writeln!(s, "kappa = {}", fmt_f64(kappa));
        }
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "nx = {}", self.nx);
        let _ = writeln!(s, "ny = {}", self.ny);
        let _ = writeln!(s, "\n[time]");
        let _ = writeln!(s, "tau = {}", fmt_f64(self.tau));
        if let Some(t) = self.t_end {
            let _ = writeln!(s, "t_end = {}", fmt_f64(t));
        }
        let _ = writeln!(s, "\n[scheme]");
        let _ = writeln!(s, "k = {}", fmt_f64(self.k));
        let _ = writeln!(s, "l = {}", fmt_f64(self.l));
        let _ = writeln!(s, "stab = {}", self.stab);
        let _ = writeln!(s, "cs = {}", fmt_f64(self.cs));
        let _ = writeln!(s, "rtol = {}", fmt_f64(self.rtol));
        let _ = writeln!(s, "blowup_factor = {}", fmt_f64(self.blowup_factor));
        let _ = writeln!(s, "\n[gsav]");
        if let Some(a) = self.alpha {
            let _ = writeln!(s, "alpha = {}", fmt_f64(a));
        }
        let _ = writeln!(s, "c_f1 = {}", fmt_f64(self.c_f1));
        let _ = writeln!(s, "c_g = {}", fmt_f64(self.c_g));
        let _ = writeln!(s, "\n[output]");
        if let Some(d) = &self.out_dir {
            let _ = writeln!(s, "dir = {d}");
        }
        let _ = writeln!(s, "vtk_every = {}", self.vtk_every);
        s
    }

    pub fn stab_kind(&self) -> Result<StabKind, Error> {
        match self.stab.as_str() {
            "none" => Ok(StabKind::None),
            "sa" => Ok(StabKind::Sa),
            "sb" => Ok(StabKind::Sb),
            other => Err(Error::Config(format!("unknown stabilization `{other}`"))),
        }
    }

    /// Materialize the problem spec (with overrides applied) and the scheme
    /// configuration.
    pub fn build(&self) -> Result<(ProblemSpec, SchemeConfig), Error> {
        let mut spec = match self.kind.as_str() {
            "manufactured" => manufactured_spec(),
            "marsigli" => marsigli_spec(),
            "shear" => shear_layer_spec(),
            other => return Err(Error::Config(format!("unknown problem kind `{other}`"))),
        };
        if let Some(nu) = self.nu {
            spec.nu = nu;
        }
        if let Some(kappa) = self.kappa {
            spec.kappa = kappa;
        }
        if let Some(alpha) = self.alpha {
            spec.alpha = alpha;
        }
        spec.c_f1 = self.c_f1;
        spec.c_g = self.c_g;
        let cfg = SchemeConfig {
            bdf: BdfParams::new(self.k, self.l)?,
            stab: Stabilization::new(self.stab_kind()?, self.cs)?,
            solve: SolveOpts {
                rtol: self.rtol,
                ..SolveOpts::default()
            },
            blowup_factor: self.blowup_factor,
        };
        Ok((spec, cfg))
    }
}
