//! Command-line experiment runner.

pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::asymptotics::{diffraction_coefficient_mode, diffraction_kernel, verify_theorem_1_1, verify_theorem_1_2};
use crate::bessel::bessel_pair;
use crate::cross_section::{Boundary, ConeGeometry, Mode};
use crate::kernel::{sine_mode_kernel, QuadratureSpec};
use crate::radiation::{
    radiation_field_mode, scattering_matrix_from_kernel, scattering_operator_kernel_with, LagGrid, RadiationOptions,
};
use crate::scattering::{scattering_eigenvalue, scattering_eigenvalue_ode, LambdaSign};
use crate::Error;
pub use config::{ExperimentConfig, Format, Model, Operation};
use output::{json_line, Cell, Csv};

#[derive(Debug, Parser)]
#[command(name = "conekit", version, about = "Diffraction and scattering on product cones")]
pub struct Cli {
    /// Falls back to `operation` in the config file.
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Mode table of the cross section.
    Modes,
    /// J, Y and derivatives on a (nu, z) grid with a Wronskian check.
    BesselTable,
    /// Sine kernel per mode on the t grid; checks finite propagation speed.
    Kernel,
    /// Closed-form scattering eigenvalues against the radial ODE.
    Scattering,
    /// Diffraction coefficients, and the kernel when theta/theta-prime are set.
    Diffraction,
    /// Radiation traces and S recovered from the scattering-operator kernel.
    Radiation,
    /// Per-mode checks of the leading symbol and the one-step expansion.
    Verify,
}

impl Command {
    pub fn operation(self) -> Operation {
        match self {
            Command::Modes => Operation::Modes,
            Command::BesselTable => Operation::BesselTable,
            Command::Kernel => Operation::Kernel,
            Command::Scattering => Operation::Scattering,
            Command::Diffraction => Operation::Diffraction,
            Command::Radiation => Operation::Radiation,
            Command::Verify => Operation::Verify,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BcArg {
    Dirichlet,
    Neumann,
}

/// Flat overrides; any flag given wins over the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Vec<Format>,
    #[arg(long, global = true)]
    pub model: Option<Model>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub circumference: Option<f64>,
    #[arg(long, global = true)]
    pub length: Option<f64>,
    #[arg(long, global = true)]
    pub bc: Option<BcArg>,
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true)]
    pub rp: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    #[arg(long, global = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, global = true)]
    pub decay_lambda_min: Option<f64>,
    #[arg(long, global = true)]
    pub decay_lambda_max: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub nu: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub z: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta_prime: Vec<f64>,
    #[arg(long, global = true)]
    pub abel_eps: Option<f64>,
    #[arg(long, global = true)]
    pub j_max: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub r_ladder: Vec<f64>,
    #[arg(long, global = true)]
    pub lag_h: Option<f64>,
    #[arg(long, global = true)]
    pub lag_half_width: Option<f64>,
}

fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
    if let Some(v) = v {
        *slot = v.clone();
    }
}

fn set_list(slot: &mut Vec<f64>, v: &[f64]) {
    if !v.is_empty() {
        *slot = v.to_vec();
    }
}

impl Overrides {
    /// Config file (if any) with the flags applied on top.
    pub fn resolve(&self, op: Option<Operation>) -> crate::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if op.is_some() {
            c.operation = op;
        }
        if c.operation.is_none() {
            return Err(Error::ConfigInvalid { key: "operation".into(), message: "give a subcommand or set operation".into() });
        }
        let g = &mut c.geometry;
        set(&mut g.model, &self.model);
        if self.n.is_some() {
            g.n = self.n;
        }
        if self.circumference.is_some() {
            g.circumference = self.circumference;
        }
        if self.length.is_some() {
            g.length = self.length;
        }
        if let Some(bc) = self.bc {
            g.bc = Some(match bc {
                BcArg::Dirichlet => Boundary::Dirichlet,
                BcArg::Neumann => Boundary::Neumann,
            });
        }
        if self.table.is_some() {
            g.table = self.table.clone();
        }
        let nc = &mut c.numeric;
        set(&mut nc.modes, &self.modes);
        set(&mut nc.r, &self.r);
        set(&mut nc.rp, &self.rp);
        set_list(&mut nc.t, &self.t);
        set_list(&mut nc.lambda, &self.lambda);
        set(&mut nc.lambda_max, &self.lambda_max);
        set(&mut nc.decay_lambda_min, &self.decay_lambda_min);
        set(&mut nc.decay_lambda_max, &self.decay_lambda_max);
        set_list(&mut nc.nu, &self.nu);
        set_list(&mut nc.z, &self.z);
        set_list(&mut nc.s, &self.s);
        if !self.theta.is_empty() {
            nc.theta = Some(self.theta.clone());
        }
        if !self.theta_prime.is_empty() {
            nc.theta_prime = Some(self.theta_prime.clone());
        }
        set(&mut nc.abel_eps, &self.abel_eps);
        set(&mut nc.j_max, &self.j_max);
        set_list(&mut nc.r_ladder, &self.r_ladder);
        set(&mut nc.lag_h, &self.lag_h);
        set(&mut nc.lag_half_width, &self.lag_half_width);
        if self.out.is_some() {
            c.output.dir = self.out.clone();
        }
        if !self.format.is_empty() {
            c.output.formats = self.format.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

/// A library failure tagged with the subcommand and operation.
#[derive(Debug)]
pub struct RunError {
    pub context: String,
    pub error: Error,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.context, self.error)
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self.error {
            Error::ConfigInvalid { .. } => 2,
            _ => 3,
        }
    }
}

/// Records and data produced by one run.
#[derive(Debug, Clone)]
pub struct Report {
    pub operation: Operation,
    pub config_hash: String,
    pub records: Vec<Value>,
    pub csv: Option<String>,
    pub pass: bool,
}

impl Report {
    pub fn jsonl(&self) -> String {
        self.records.iter().map(|r| json_line(r) + "\n").collect()
    }
}

struct Ctx<'a> {
    op: Operation,
    hash: &'a str,
}

impl Ctx<'_> {
    fn err(&self, what: &str) -> impl Fn(Error) -> RunError + '_ {
        let context = format!("{}: {what}", self.op.name());
        move |error| RunError { context: context.clone(), error }
    }

    fn record(&self, kind: &str, mut body: Value) -> Value {
        let m = body.as_object_mut().expect("record body is an object");
        m.insert("kind".into(), json!(kind));
        m.insert("config_hash".into(), json!(self.hash));
        body
    }
}

/// First mode of each distinct `ν` among the first `count` modes, with the
/// indices sharing it.
fn distinct_modes(geom: &ConeGeometry, count: usize) -> crate::Result<Vec<(Mode, Vec<usize>)>> {
    let mut out: Vec<(Mode, Vec<usize>)> = Vec::new();
    for m in geom.modes(count)? {
        match out.iter_mut().find(|(p, _)| (p.nu - m.nu).abs() <= 1e-12 * m.nu.max(1.0)) {
            Some((_, idx)) => idx.push(m.index),
            None => {
                let i = m.index;
                out.push((m, vec![i]));
            }
        }
    }
    Ok(out)
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let op = cfg.operation.unwrap_or(Operation::Verify);
    let hash = cfg.hash();
    let ctx = Ctx { op, hash: &hash };
    let geom = if op == Operation::BesselTable { None } else { Some(cfg.geometry().map_err(ctx.err("geometry"))?) };
    let geom = geom.as_ref();
    let nc = &cfg.numeric;
    let mut records = Vec::new();
    let mut csv = None;
    let mut pass = true;
    match op {
        Operation::Modes => {
            let geom = geom.expect("geometry is resolved");
            let mut t = Csv::new(&["index", "mu_sq", "nu"]);
            for m in geom.modes(nc.modes).map_err(ctx.err("modes"))? {
                t.row(&[Cell::U(m.index), Cell::F(m.mu_sq), Cell::F(m.nu)]);
                records.push(ctx.record("mode", json!({"index": m.index, "mu_sq": m.mu_sq, "nu": m.nu})));
            }
            csv = Some(t.into_string());
        }
        Operation::BesselTable => {
            let mut t = Csv::new(&["nu", "z", "j", "y", "jp", "yp", "wronskian_rel_err"]);
            let mut worst = 0.0f64;
            for &nu in &nc.nu {
                for &z in &nc.z {
                    let p = bessel_pair(nu, z).map_err(ctx.err("bessel_pair"))?;
                    let w = 2.0 / (std::f64::consts::PI * z);
                    let rel = ((p.j * p.yp - p.jp * p.y) - w).abs() / w;
                    worst = worst.max(rel);
                    t.row(&[Cell::F(nu), Cell::F(z), Cell::F(p.j), Cell::F(p.y), Cell::F(p.jp), Cell::F(p.yp), Cell::F(rel)]);
                }
            }
            pass = worst <= nc.wronskian_tol;
            records.push(ctx.record(
                "bessel_table",
                json!({"rows": nc.nu.len() * nc.z.len(), "max_wronskian_rel_err": worst, "tol": nc.wronskian_tol, "pass": pass}),
            ));
            csv = Some(t.into_string());
        }
        Operation::Kernel => {
            let geom = geom.expect("geometry is resolved");
            let spec = QuadratureSpec::filon();
            let mut t = Csv::new(&["j", "nu", "t", "r", "rp", "re", "im", "err"]);
            let gap = (nc.r - nc.rp).abs();
            for (m, indices) in distinct_modes(&geom, nc.modes).map_err(ctx.err("modes"))? {
                let mut precursor = 0.0f64;
                let mut ok = true;
                for &time in &nc.t {
                    let v = sine_mode_kernel(&geom, &m, time, nc.r, nc.rp, &spec).map_err(ctx.err("sine_mode_kernel"))?;
                    t.row(&[
                        Cell::U(m.index),
                        Cell::F(m.nu),
                        Cell::F(time),
                        Cell::F(nc.r),
                        Cell::F(nc.rp),
                        Cell::F(v.value.re),
                        Cell::F(v.value.im),
                        Cell::F(v.est_err),
                    ]);
                    if time > 0.0 && time < gap {
                        precursor = precursor.max(v.value.norm());
                        ok &= v.value.norm() <= v.est_err;
                    }
                }
                pass &= ok;
                records.push(ctx.record(
                    "kernel",
                    json!({"modes": indices, "nu": m.nu, "r": nc.r, "rp": nc.rp, "max_precursor": precursor, "pass": ok}),
                ));
            }
            csv = Some(t.into_string());
        }
        Operation::Scattering => {
            let geom = geom.expect("geometry is resolved");
            let mut t = Csv::new(&["mode", "nu", "lambda", "s_re", "s_im", "ode_re", "ode_im"]);
            for (m, indices) in distinct_modes(&geom, nc.modes).map_err(ctx.err("modes"))? {
                for &l in &nc.lambda {
                    let sign = LambdaSign::of(l).map_err(ctx.err("scattering_eigenvalue"))?;
                    let s = scattering_eigenvalue(&m, sign);
                    // the ODE route runs on |λ|; λ < 0 is its conjugate
                    let r_max = 400.0 * (m.nu + 1.0) / l.abs();
                    let io = scattering_eigenvalue_ode(&geom, &m, l.abs(), r_max).map_err(ctx.err("scattering_eigenvalue_ode"))?;
                    let ode = if l > 0.0 { io.ratio() } else { io.ratio().conj() };
                    let err = (ode - s).norm();
                    let ok = err <= nc.scattering_tol;
                    pass &= ok;
                    t.row(&[Cell::U(m.index), Cell::F(m.nu), Cell::F(l), Cell::F(s.re), Cell::F(s.im), Cell::F(ode.re), Cell::F(ode.im)]);
                    records.push(ctx.record(
                        "scattering",
                        json!({
                            "modes": indices, "nu": m.nu, "lambda": l, "closed_form": cjson(s), "ode": cjson(ode),
                            "abs_err": err, "unitarity_err": (s.norm() - 1.0).abs(), "fit_residual": io.fit_residual,
                            "tol": nc.scattering_tol, "pass": ok,
                        }),
                    ));
                }
            }
            csv = Some(t.into_string());
        }
        Operation::Diffraction => {
            let geom = geom.expect("geometry is resolved");
            let mut t = Csv::new(&["mode", "nu", "r", "rp", "k0_re", "k0_im"]);
            for (m, indices) in distinct_modes(&geom, nc.modes).map_err(ctx.err("modes"))? {
                let k0 = diffraction_coefficient_mode(&geom, &m, nc.r, nc.rp);
                t.row(&[Cell::U(m.index), Cell::F(m.nu), Cell::F(nc.r), Cell::F(nc.rp), Cell::F(k0.re), Cell::F(k0.im)]);
                records.push(ctx.record(
                    "diffraction_coefficient",
                    json!({"modes": indices, "nu": m.nu, "r": nc.r, "rp": nc.rp, "k0": cjson(k0)}),
                ));
            }
            if let (Some(a), Some(b)) = (&nc.theta, &nc.theta_prime) {
                let k = diffraction_kernel(&geom, a, b, nc.r, nc.rp, nc.abel_eps, nc.j_max)
                    .map_err(ctx.err("diffraction_kernel"))?;
                records.push(ctx.record(
                    "diffraction_kernel",
                    json!({
                        "theta": a, "theta_prime": b, "r": nc.r, "rp": nc.rp, "value": cjson(k.value),
                        "est_err": k.est_err, "modes_used": k.modes_used,
                    }),
                ));
            }
            csv = Some(t.into_string());
        }
        Operation::Radiation => {
            let geom = geom.expect("geometry is resolved");
            let opts = RadiationOptions {
                r_ladder: nc.r_ladder.clone(),
                lag: LagGrid { h: nc.lag_h, half_width: nc.lag_half_width },
                rp_offset: 0.0,
            };
            let mut t = Csv::new(&["mode", "nu", "s", "w", "residual"]);
            for (m, indices) in distinct_modes(&geom, nc.modes).map_err(ctx.err("modes"))? {
                let tr = radiation_field_mode(&geom, &m, nc.rp, &nc.s, &nc.r_ladder).map_err(ctx.err("radiation_field_mode"))?;
                for ((s, w), e) in tr.s_grid.iter().zip(&tr.values).zip(&tr.est_err) {
                    t.row(&[Cell::U(m.index), Cell::F(m.nu), Cell::F(*s), Cell::F(*w), Cell::F(*e)]);
                }
                let kernel = scattering_operator_kernel_with(&geom, &m, &opts).map_err(ctx.err("scattering_operator_kernel_mode"))?;
                for &l in &nc.lambda {
                    let est = scattering_matrix_from_kernel(&kernel, l).map_err(ctx.err("scattering_matrix_from_radiation"))?;
                    let sign = LambdaSign::of(l).map_err(ctx.err("scattering_eigenvalue"))?;
                    let s = scattering_eigenvalue(&m, sign);
                    let err = (est - s).norm();
                    let ok = err <= nc.radiation_tol;
                    pass &= ok;
                    records.push(ctx.record(
                        "radiation_s",
                        json!({
                            "modes": indices, "nu": m.nu, "lambda": l, "estimate": cjson(est), "closed_form": cjson(s),
                            "abs_err": err, "kernel_ladder_residuals": kernel.extrapolation_residuals,
                            "trace_ladder_residuals": tr.extrapolation_residuals, "tol": nc.radiation_tol, "pass": ok,
                        }),
                    ));
                }
            }
            csv = Some(t.into_string());
        }
        Operation::Verify => {
            let geom = geom.expect("geometry is resolved");
            for (m, indices) in distinct_modes(&geom, nc.modes).map_err(ctx.err("modes"))? {
                let a = verify_theorem_1_1(&geom, &m, nc.r, nc.rp, nc.lambda_max).map_err(ctx.err("verify_theorem_1_1"))?;
                let b = verify_theorem_1_2(&geom, &m, nc.r, nc.rp, nc.decay_lambda_min, nc.decay_lambda_max)
                    .map_err(ctx.err("verify_theorem_1_2"))?;
                pass &= a.pass && b.pass;
                let mut va = serde_json::to_value(&a).expect("report serializes");
                va["modes"] = json!(indices);
                let mut vb = serde_json::to_value(&b).expect("report serializes");
                vb["modes"] = json!(indices);
                records.push(ctx.record("theorem_1_1", va));
                records.push(ctx.record("theorem_1_2", vb));
            }
        }
    }
    let checks = records.iter().filter(|r| r.get("pass").is_some()).count();
    let failed = records.iter().filter(|r| r.get("pass") == Some(&json!(false))).count();
    records.push(ctx.record("summary", json!({"operation": op.name(), "checks": checks, "failed": failed, "pass": pass})));
    Ok(Report { operation: op, config_hash: hash, records, csv, pass })
}

/// Writes artifacts to the output directory, or to `out` when none is set.
pub fn emit(cfg: &ExperimentConfig, report: &Report, out: &mut dyn std::io::Write) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError { context: format!("{}: output", report.operation.name()), error: e.into() };
    let want = |f: Format| cfg.output.formats.contains(&f);
    let name = report.operation.name();
    match &cfg.output.dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            if want(Format::Csv) {
                if let Some(csv) = &report.csv {
                    std::fs::write(dir.join(format!("{name}.csv")), csv).map_err(io)?;
                }
            }
            if want(Format::Jsonl) {
                std::fs::write(dir.join(format!("{name}.jsonl")), report.jsonl()).map_err(io)?;
            }
            let summary = report.records.last().expect("summary record");
            writeln!(out, "{}", json_line(summary)).map_err(io)?;
        }
        None => {
            if want(Format::Csv) {
                if let Some(csv) = &report.csv {
                    out.write_all(csv.as_bytes()).map_err(io)?;
                }
            }
            if want(Format::Jsonl) {
                out.write_all(report.jsonl().as_bytes()).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Resolves the config, runs and emits; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    let op = cli.command.map(Command::operation);
    let cfg = match cli.overrides.resolve(op) {
        Ok(c) => c,
        Err(e) => {
            let name = op.map_or("config", Operation::name);
            let _ = writeln!(err, "conekit {name}: {e}");
            return 2;
        }
    };
    let result = execute(&cfg).and_then(|r| emit(&cfg, &r, out).map(|_| r));
    match result {
        Ok(r) if r.pass => 0,
        Ok(_) => 1,
        Err(e) => {
            let _ = writeln!(err, "conekit {e}");
            e.exit_code()
        }
    }
}

/// Caps rayon's global pool from `CONEKIT_THREADS`.
pub fn init_threads(value: Option<&str>) -> crate::Result<()> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::ConfigInvalid {
        key: "CONEKIT_THREADS".into(),
        message: format!("expected a positive integer, got {v:?}"),
    })?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
