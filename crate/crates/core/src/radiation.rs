//! Radiation fields of the per-mode forward fundamental solution and the
//! scattering matrix recovered from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cross_section::{ConeGeometry, Mode};
use crate::kernel::{sine_from_plan, ModeIntegralPlan};
use crate::numerics::extrapolate::{richardson_real, Extrapolation};
use crate::{Error, Result};

pub const DEFAULT_LADDER: [f64; 3] = [200.0, 400.0, 800.0];

/// Extrapolated radiation field `w(s)` of one mode, source radius `r'`.
#[derive(Debug, Clone, Serialize)]
pub struct RadiationFieldTrace {
    pub mode_index: usize,
    pub nu: f64,
    pub r_prime: f64,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub r_ladder: Vec<f64>,
    /// Largest diagonal step of the Richardson tables, per ladder level.
    pub extrapolation_residuals: Vec<f64>,
    /// Per-sample error estimate.
    pub est_err: Vec<f64>,
    /// Raw rescaled values per ladder level.
    pub raw: Vec<Vec<f64>>,
}

/// Uniform lag grid `u_i = i h`, `|u_i| ≤ half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagGrid {
    pub h: f64,
    pub half_width: f64,
}

impl Default for LagGrid {
    fn default() -> Self {
        Self { h: 0.05, half_width: 32.0 }
    }
}

impl LagGrid {
    fn half_count(&self) -> usize {
        (self.half_width / self.h + 1e-9).floor() as usize
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.half_count() as i64;
        (-n..=n).map(|i| i as f64 * self.h).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.half_width >= 8.0 * self.h) {
            return Err(Error::BadSpec(format!("lag grid h={} half_width={}", self.h, self.half_width)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiationOptions {
    pub r_ladder: Vec<f64>,
    pub lag: LagGrid,
    /// `r' = r + rp_offset` along the double ladder.
    pub rp_offset: f64,
}

impl Default for RadiationOptions {
    fn default() -> Self {
        Self { r_ladder: DEFAULT_LADDER.to_vec(), lag: LagGrid::default(), rp_offset: 0.0 }
    }
}

/// Per-mode scattering-operator kernel on a lag grid.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorKernel {
    pub mode_index: usize,
    pub nu: f64,
    pub lag: LagGrid,
    pub values: Vec<f64>,
    pub r_ladder: Vec<f64>,
    pub extrapolation_residuals: Vec<f64>,
}

impl OperatorKernel {
    pub fn lags(&self) -> Vec<f64> {
        self.lag.points()
    }
}

fn ladder_ratio(ladder: &[f64]) -> Result<f64> {
    if ladder.len() < 2 {
        return Err(Error::BadSpec("radius ladder needs at least two levels".into()));
    }
    if ladder.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::NonPositiveParameter("ladder radius"));
    }
    let q = ladder[1] / ladder[0];
    if !(q > 1.0) || ladder.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(Error::BadSpec("radius ladder must increase geometrically".into()));
    }
    Ok(q)
}

/// Richardson in `1/r` for each column of `levels[level][sample]`.
fn extrapolate_columns(levels: &[Vec<f64>], ratio: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = levels[0].len();
    let tables: Vec<Extrapolation> = (0..n)
        .map(|i| {
            let seq: Vec<f64> = levels.iter().map(|l| l[i]).collect();
            richardson_real(&seq, ratio)
        })
        .collect();
    let mut residuals = vec![0.0f64; levels.len() - 1];
    for t in &tables {
        for (acc, r) in residuals.iter_mut().zip(&t.residuals) {
            *acc = acc.max(*r);
        }
    }
    let values = tables.iter().map(|t| t.limit.re).collect();
    let errs = tables.iter().map(|t| t.est_err).collect();
    (values, errs, residuals)
}

/// Residuals this small relative to the data are rounding, not trend.
fn noise_floor(levels: &[Vec<f64>]) -> f64 {
    1e-9 * levels.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()))
}

fn check_settled(residuals: &[f64], floor: f64, what: &str) -> Result<()> {
    for w in residuals.windows(2) {
        if w[1] > w[0] && w[1] > floor {
            return Err(Error::NotConverging(format!("{what}: ladder residuals {residuals:?}")));
        }
    }
    Ok(())
}

/// `w(s) = lim r^{(n-1)/2} E(s + r, r, r')` for one mode.
pub fn radiation_field_mode(
    geom: &ConeGeometry,
    mode: &Mode,
    rp: f64,
    s_grid: &[f64],
    r_ladder: &[f64],
) -> Result<RadiationFieldTrace> {
    if !(rp > 0.0) {
        return Err(Error::NonPositiveParameter("r'"));
    }
    let ratio = ladder_ratio(r_ladder)?;
    let s_max = s_grid.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if r_ladder[0] < 10.0 * (rp + s_max) {
        return Err(Error::RegimeViolation(format!(
            "ladder starts at {} below 10(r' + max|s|) = {}",
            r_ladder[0],
            10.0 * (rp + s_max)
        )));
    }
    let exponent = 0.5 - geom.alpha;
    let mut raw = Vec::with_capacity(r_ladder.len());
    let mut level_err = vec![0.0f64; s_grid.len()];
    for &r in r_ladder {
        let plan = ModeIntegralPlan::new(mode.nu, r, rp, 0, None, s_max + r)?;
        let scale = r.powf(exponent) * (r * rp).powf(geom.alpha);
        let vals: Vec<(f64, f64)> = s_grid
            .par_iter()
            .map(|&s| sine_from_plan(&plan, s + r).map(|(v, e)| (v * scale, e * scale)))
            .collect::<Result<_>>()?;
        for (acc, (_, e)) in level_err.iter_mut().zip(&vals) {
            *acc = acc.max(*e);
        }
        raw.push(vals.into_iter().map(|(v, _)| v).collect::<Vec<_>>());
    }
    let (values, errs, residuals) = extrapolate_columns(&raw, ratio);
    let floor = noise_floor(&raw);
    check_settled(&residuals, floor, "radiation field")?;
    Ok(RadiationFieldTrace {
        mode_index: mode.index,
        nu: mode.nu,
        r_prime: rp,
        s_grid: s_grid.to_vec(),
        values,
        r_ladder: r_ladder.to_vec(),
        extrapolation_residuals: residuals,
        est_err: errs.iter().zip(&level_err).map(|(a, b)| a.max(*b)).collect(),
        raw,
    })
}

/// Fourth-order centered difference at `u_i = i h` from samples at
/// `(j + 1/2) h`, stored with `f[j + n + 2]`.
fn offset_derivative(f: &[f64], n: usize, h: f64) -> Vec<f64> {
    (0..=2 * n)
        .map(|k| {
            // u = (k - n) h; F(u + h/2) sits at index k + 2.
            let (m3, m1, p1, p3) = (f[k], f[k + 1], f[k + 2], f[k + 3]);
            (m3 - 27.0 * m1 + 27.0 * p1 - p3) / (24.0 * h)
        })
        .collect()
}

fn offset_points(lag: &LagGrid) -> Vec<f64> {
    let n = lag.half_count() as i64;
    (-n - 2..=n + 1).map(|j| (j as f64 + 0.5) * lag.h).collect()
}

/// Kernel `κ(u)` of the scattering operator for one mode with the default
/// radius ladder.
pub fn scattering_operator_kernel_mode(geom: &ConeGeometry, mode: &Mode, lag: &LagGrid) -> Result<OperatorKernel> {
    let opts = RadiationOptions { lag: *lag, ..RadiationOptions::default() };
    scattering_operator_kernel_with(geom, mode, &opts)
}

/// `κ(u) = lim 2 (rr')^{(n-1)/2} ∂_t E(r + r' - u, r, r')` along the double
/// ladder `r' = r + rp_offset`.
pub fn scattering_operator_kernel_with(geom: &ConeGeometry, mode: &Mode, opts: &RadiationOptions) -> Result<OperatorKernel> {
    opts.lag.validate()?;
    let ratio = ladder_ratio(&opts.r_ladder)?;
    let lag = opts.lag;
    if opts.r_ladder[0] < 4.0 * lag.half_width || opts.r_ladder[0] + opts.rp_offset <= 4.0 * lag.half_width {
        return Err(Error::RegimeViolation(format!(
            "ladder starts at {} below four lag half-widths",
            opts.r_ladder[0]
        )));
    }
    let n = lag.half_count();
    let v = offset_points(&lag);
    let v_max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut levels = Vec::with_capacity(opts.r_ladder.len());
    for &r in &opts.r_ladder {
        let rp = r + opts.rp_offset;
        let plan = ModeIntegralPlan::new(mode.nu, r, rp, 0, None, r + rp + v_max)?;
        let scale = 2.0 * (r * rp).powf(0.5 - geom.alpha) * (r * rp).powf(geom.alpha);
        let f: Vec<f64> = v
            .par_iter()
            .map(|&x| sine_from_plan(&plan, r + rp - x).map(|(s, _)| s * scale))
            .collect::<Result<_>>()?;
        // d/du E(r + r' - u) = -∂_t E
        levels.push(offset_derivative(&f, n, lag.h).into_iter().map(|d| -d).collect::<Vec<_>>());
    }
    let (values, _, residuals) = extrapolate_columns(&levels, ratio);
    let floor = noise_floor(&levels);
    check_settled(&residuals, floor, "scattering kernel")?;
    Ok(OperatorKernel {
        mode_index: mode.index,
        nu: mode.nu,
        lag,
        values,
        r_ladder: opts.r_ladder.clone(),
        extrapolation_residuals: residuals,
    })
}

fn hann(u: f64, half_width: f64) -> f64 {
    if u.abs() >= half_width {
        0.0
    } else {
        (0.5 * PI * u / half_width).cos().powi(2)
    }
}

/// Response of the windowed, differenced transform to the two singular
/// model kernels `δ(u)` and `p.v. 1/(πu)`, normalized so both tend to 1.
fn leakage_factors(lag: &LagGrid, lambda: f64) -> (f64, f64) {
    let n = lag.half_count();
    let v = offset_points(lag);
    let step: Vec<f64> = v.iter().map(|&x| if x > 0.0 { 1.0 } else { 0.0 }).collect();
    let log: Vec<f64> = v.iter().map(|&x| x.abs().ln() / PI).collect();
    let ds = offset_derivative(&step, n, lag.h);
    let dl = offset_derivative(&log, n, lag.h);
    let (mut even, mut odd) = (0.0, 0.0);
    for (k, u) in lag.points().into_iter().enumerate() {
        let w = hann(u, lag.half_width) * lag.h;
        even += w * ds[k] * (lambda * u).cos();
        odd += w * dl[k] * (lambda * u).sin();
    }
    (even, odd * lambda.signum())
}

fn check_band(lag: &LagGrid, lambda: f64) -> Result<()> {
    let l = lambda.abs();
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::BandViolation(format!("lambda {lambda}")));
    }
    let period = 2.0 * PI / l;
    if period < 8.0 * lag.h {
        return Err(Error::BandViolation(format!("lambda {lambda}: fewer than 8 samples per period")));
    }
    if 2.0 * lag.half_width < 10.0 * period {
        return Err(Error::BandViolation(format!("lambda {lambda}: lag window shorter than 10 periods")));
    }
    Ok(())
}

/// Hann-windowed `Σ h κ(u) e^{-iλu}` with the even and odd parts divided
/// by their leakage factors.
pub fn scattering_matrix_from_kernel(kernel: &OperatorKernel, lambda: f64) -> Result<Complex64> {
    let lag = kernel.lag;
    check_band(&lag, lambda)?;
    let (ge, go) = leakage_factors(&lag, lambda);
    let (mut c, mut s) = (0.0, 0.0);
    for (u, k) in lag.points().into_iter().zip(&kernel.values) {
        let w = hann(u, lag.half_width) * lag.h;
        c += w * k * (lambda * u).cos();
        s += w * k * (lambda * u).sin();
    }
    Ok(Complex64::new(c / ge, -s / go))
}

pub fn scattering_matrix_from_radiation(geom: &ConeGeometry, mode: &Mode, lambda: f64) -> Result<Complex64> {
    scattering_matrix_from_radiation_with(geom, mode, lambda, &RadiationOptions::default())
}

pub fn scattering_matrix_from_radiation_with(
    geom: &ConeGeometry,
    mode: &Mode,
    lambda: f64,
    opts: &RadiationOptions,
) -> Result<Complex64> {
    check_band(&opts.lag, lambda)?;
    let kernel = scattering_operator_kernel_with(geom, mode, opts)?;
    scattering_matrix_from_kernel(&kernel, lambda)
}
