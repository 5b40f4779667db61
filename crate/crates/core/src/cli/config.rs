use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cross_section::{build_cross_section, Boundary, ConeGeometry, CrossSectionSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Modes,
    BesselTable,
    Kernel,
    Scattering,
    Diffraction,
    Radiation,
    Verify,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Modes => "modes",
            Operation::BesselTable => "bessel-table",
            Operation::Kernel => "kernel",
            Operation::Scattering => "scattering",
            Operation::Diffraction => "diffraction",
            Operation::Radiation => "radiation",
            Operation::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Circle,
    Interval,
    Sphere2,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub model: Model,
    pub n: Option<usize>,
    pub circumference: Option<f64>,
    pub length: Option<f64>,
    pub bc: Option<Boundary>,
    /// Path to an `N-TABLE v1` file.
    pub table: Option<PathBuf>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { model: Model::Circle, n: None, circumference: None, length: None, bc: None, table: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub modes: usize,
    pub r: f64,
    pub rp: f64,
    /// Times for the `kernel` subcommand.
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Top of the Theorem 1.1 grid.
    pub lambda_max: f64,
    /// Range of the remainder-decay fit.
    pub decay_lambda_min: f64,
    pub decay_lambda_max: f64,
    pub nu: Vec<f64>,
    pub z: Vec<f64>,
    /// Lags for radiation traces.
    pub s: Vec<f64>,
    pub theta: Option<Vec<f64>>,
    pub theta_prime: Option<Vec<f64>>,
    pub abel_eps: f64,
    pub j_max: usize,
    pub r_ladder: Vec<f64>,
    pub lag_h: f64,
    pub lag_half_width: f64,
    pub scattering_tol: f64,
    pub radiation_tol: f64,
    pub wronskian_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            modes: 8,
            r: 1.0,
            rp: 1.9,
            t: vec![0.3, 0.6, 1.2, 2.0, 3.5],
            lambda: vec![1.0, 2.0, 4.0],
            lambda_max: 1e3,
            decay_lambda_min: 1e2,
            decay_lambda_max: 1e4,
            nu: vec![0.0, 0.5, 1.0, 2.7, 10.5],
            z: vec![0.1, 1.0, 10.0, 50.0],
            s: (0..17).map(|k| -4.0 + 0.5 * k as f64 + 0.05).collect(),
            theta: None,
            theta_prime: None,
            abel_eps: 0.2,
            j_max: 8001,
            r_ladder: vec![200.0, 400.0, 800.0],
            lag_h: 0.05,
            lag_half_width: 32.0,
            scattering_tol: 1e-6,
            radiation_tol: 1e-3,
            wronskian_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, formats: vec![Format::Csv, Format::Jsonl] }
    }
}

/// Everything a run depends on. Serialized form is hashed into every record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub operation: Option<Operation>,
    pub geometry: GeometryConfig,
    pub numeric: NumericConfig,
    pub output: OutputConfig,
}

fn pos(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigInvalid { key: key.to_string(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| invalid("<file>", e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<file>".to_string() } else { path };
            invalid(&key, e.into_inner().message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex sha256 of the canonical JSON form, leaving out the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = None;
        let canon = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(canon.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.operation != Some(Operation::BesselTable) {
            self.validate_geometry()?;
        }
        self.validate_numeric()
    }

    fn validate_geometry(&self) -> Result<()> {
        let g = &self.geometry;
        match g.model {
            Model::Circle => pos("geometry.circumference", g.circumference.ok_or_else(|| invalid("geometry.circumference", "required for model circle"))?)?,
            Model::Interval => pos("geometry.length", g.length.ok_or_else(|| invalid("geometry.length", "required for model interval"))?)?,
            Model::Tabulated => {
                g.table.as_ref().ok_or_else(|| invalid("geometry.table", "required for model tabulated"))?;
            }
            Model::Sphere2 => {}
        }
        let want_n = if g.model == Model::Sphere2 { 3 } else { 2 };
        if let Some(n) = g.n {
            if n != want_n {
                return Err(invalid("geometry.n", format!("model {:?} needs n = {want_n}, got {n}", g.model)));
            }
        }
        Ok(())
    }

    fn validate_numeric(&self) -> Result<()> {
        let nc = &self.numeric;
        if nc.modes == 0 {
            return Err(invalid("numeric.modes", "must be at least 1"));
        }
        pos("numeric.r", nc.r)?;
        pos("numeric.rp", nc.rp)?;
        pos("numeric.lambda_max", nc.lambda_max)?;
        pos("numeric.decay_lambda_min", nc.decay_lambda_min)?;
        pos("numeric.decay_lambda_max", nc.decay_lambda_max)?;
        if nc.decay_lambda_max <= nc.decay_lambda_min {
            return Err(invalid("numeric.decay_lambda_max", "must exceed decay_lambda_min"));
        }
        if let Some(l) = nc.lambda.iter().find(|l| !(l.is_finite() && **l != 0.0)) {
            return Err(invalid("numeric.lambda", format!("entries must be finite and nonzero, got {l}")));
        }
        if let Some(z) = nc.z.iter().find(|z| !(**z > 0.0)) {
            return Err(invalid("numeric.z", format!("entries must be positive, got {z}")));
        }
        if let Some(nu) = nc.nu.iter().find(|nu| !(**nu >= 0.0)) {
            return Err(invalid("numeric.nu", format!("entries must be nonnegative, got {nu}")));
        }
        pos("numeric.abel_eps", nc.abel_eps)?;
        if nc.j_max == 0 {
            return Err(invalid("numeric.j_max", "must be at least 1"));
        }
        if nc.r_ladder.len() < 2 {
            return Err(invalid("numeric.r_ladder", "needs at least two radii"));
        }
        for (key, v) in [
            ("numeric.lag_h", nc.lag_h),
            ("numeric.lag_half_width", nc.lag_half_width),
            ("numeric.scattering_tol", nc.scattering_tol),
            ("numeric.radiation_tol", nc.radiation_tol),
            ("numeric.wronskian_tol", nc.wronskian_tol),
        ] {
            pos(key, v)?;
        }
        if nc.theta.is_some() != nc.theta_prime.is_some() {
            return Err(invalid("numeric.theta_prime", "theta and theta_prime go together"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "at least one format"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ConeGeometry> {
        let g = &self.geometry;
        let spec = match g.model {
            Model::Circle => CrossSectionSpec::Circle { circumference: g.circumference.unwrap_or(f64::NAN) },
            Model::Interval => CrossSectionSpec::Interval {
                length: g.length.unwrap_or(f64::NAN),
                boundary: g.bc.unwrap_or(Boundary::Dirichlet),
            },
            Model::Sphere2 => CrossSectionSpec::Sphere2,
            Model::Tabulated => {
                let path = g.table.as_ref().ok_or_else(|| invalid("geometry.table", "required for model tabulated"))?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid("geometry.table", format!("{}: {e}", path.display())))?;
                CrossSectionSpec::Tabulated { text }
            }
        };
        let cs = build_cross_section(&spec)?;
        let n = g.n.unwrap_or(cs.dim() + 1);
        ConeGeometry::new(n, cs)
    }
}
