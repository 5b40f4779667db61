//! Mode kernels of functions of the cone Laplacian.
//!
//! Every kernel here is a regularized integral
//! `∫ ρ(λ) e^{iτλ} λ^p J_ν(λr) J_ν(λr') dλ`. Two schemes evaluate it:
//!
//! * damped Gauss: multiply by `e^{-ελ}`, integrate by Gauss panels, and
//!   extrapolate `ε → 0` along a halving ladder;
//! * Filon: split each Bessel factor into its two Hankel waves once
//!   `λ min(r, r')` is large, integrate the four non-oscillatory channel
//!   amplitudes against `e^{iΩλ}` with exact moments, and close the integral
//!   with the Hankel expansion and exponential integrals on `[Λ, ∞)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::bessel::{asymptotic_coefficient, bessel_j, reduced_hankel};
use crate::cross_section::{ConeGeometry, Mode};
use crate::error::{Error, Result};
use crate::numerics::expint::expint_e;
use crate::numerics::extrapolate::richardson;
use crate::numerics::quadrature::{FilonRule, GaussLegendre};

const TAIL_TERMS: usize = 12;
const PANEL_RATIO: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Filon,
    DampedGauss,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub cutoff_low: f64,
    pub cutoff_high: f64,
    /// Smallest rung of the damping ladder `{8ε, 4ε, 2ε, ε}`; zero disables damping.
    pub damping_eps: f64,
    pub panels: usize,
    pub scheme: Scheme,
    /// Refuse `t` within this distance of `r + r'` or `|r - r'|`.
    pub front_margin: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            cutoff_low: 1.0,
            cutoff_high: 3200.0,
            damping_eps: 0.0125,
            panels: 16,
            scheme: Scheme::DampedGauss,
            front_margin: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn filon() -> Self {
        QuadratureSpec { scheme: Scheme::Filon, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadSpec(m.to_string()));
        if !(self.cutoff_low > 0.0 && self.cutoff_low.is_finite()) {
            return bad("cutoff_low must be positive");
        }
        if !(self.cutoff_high > self.cutoff_low && self.cutoff_high.is_finite()) {
            return bad("cutoff_high must exceed cutoff_low");
        }
        if !(self.damping_eps >= 0.0 && self.damping_eps.is_finite()) {
            return bad("damping_eps must be nonnegative");
        }
        if self.panels < 8 {
            return bad("panels must be at least 8");
        }
        if !(self.front_margin >= 0.0) {
            return bad("front_margin must be nonnegative");
        }
        Ok(())
    }

    pub fn eps_ladder(&self) -> Vec<f64> {
        if self.damping_eps == 0.0 {
            vec![0.0]
        } else {
            [8.0, 4.0, 2.0, 1.0].iter().map(|k| k * self.damping_eps).collect()
        }
    }
}

/// Smooth cutoff: 0 below `low/2`, 1 above `low`, exponential bridge between.
pub fn cutoff(lambda: f64, low: f64) -> f64 {
    let half = 0.5 * low;
    if lambda <= half {
        return 0.0;
    }
    if lambda >= low {
        return 1.0;
    }
    let x = (lambda - half) / half;
    let (a, b) = ((-1.0 / x).exp(), (-1.0 / (1.0 - x)).exp());
    a / (a + b)
}

pub fn cutoff_derivative(lambda: f64, low: f64) -> f64 {
    let half = 0.5 * low;
    if lambda <= half || lambda >= low {
        return 0.0;
    }
    let x = (lambda - half) / half;
    let (a, b) = ((-1.0 / x).exp(), (-1.0 / (1.0 - x)).exp());
    let (da, db) = (a / (x * x), b / ((1.0 - x) * (1.0 - x)));
    (da * b + a * db) / ((a + b) * (a + b)) / half
}

/// `∫_0^∞ ρ(λ) e^{iωλ} dλ` in the Abel sense, via `(i/ω) ∫ ρ'(λ) e^{iωλ} dλ`.
pub fn cutoff_fourier(omega: f64, low: f64) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(Error::RegimeViolation("zero frequency: the cutoff integral diverges".into()));
    }
    let g = GaussLegendre::cached(16);
    let panels = 64 + (omega.abs() * low / 2.0) as usize;
    let (a, b) = (0.5 * low, low);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in g.nodes.iter().zip(&g.weights) {
            let l = lo + 0.5 * h * (x + 1.0);
            acc += 0.5 * h * w * cutoff_derivative(l, low) * Complex64::from_polar(1.0, omega * l);
        }
    }
    Ok(Complex64::i() / omega * acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub est_err: f64,
    pub eps_sequence: Vec<(f64, Complex64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lower {
    Cutoff(f64),
    Zero,
}

/// Gauss nodes covering the integration range: the cutoff bridge gets its
/// own dense panels; beyond it panels grow geometrically from width 1/2 but
/// never span more than one period of the fastest oscillation.
fn gauss_nodes(lower: Lower, upper: f64, rate: f64, min_panels: usize, order: usize) -> Vec<(f64, f64)> {
    let g = GaussLegendre::cached(order);
    let mut out = Vec::new();
    let mut push = |a: f64, b: f64| {
        let h = b - a;
        for (x, w) in g.nodes.iter().zip(&g.weights) {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    };
    let start = match lower {
        Lower::Cutoff(low) => {
            let end = upper.min(low);
            for k in 0..32 {
                let a = 0.5 * low + (end - 0.5 * low) * k as f64 / 32.0;
                let b = 0.5 * low + (end - 0.5 * low) * (k + 1) as f64 / 32.0;
                push(a, b);
            }
            end
        }
        Lower::Zero => 0.0,
    };
    if upper > start {
        let period = if rate > 0.0 { 2.0 * PI / rate } else { f64::INFINITY };
        let cap = period.min((upper - start) / min_panels as f64);
        let mut a = start;
        while a < upper {
            let w = cap.min(0.5 + 0.25 * (a - start));
            let b = if a + 1.01 * w >= upper { upper } else { a + w };
            push(a, b);
            a = b;
        }
    }
    out
}

fn weight_at(lower: Lower, l: f64) -> f64 {
    match lower {
        Lower::Cutoff(low) => cutoff(l, low),
        Lower::Zero => 1.0,
    }
}

fn damped_integral<F: Fn(f64) -> Result<Complex64>>(
    amp: F,
    bandwidth: f64,
    rate: f64,
    spec: &QuadratureSpec,
    lower: Lower,
) -> Result<OscillatoryValue> {
    let ladder = spec.eps_ladder();
    let eps_min = *ladder.last().unwrap();
    let upper = if eps_min > 0.0 { spec.cutoff_high.max(40.0 / eps_min) } else { spec.cutoff_high };
    let nodes = gauss_nodes(lower, upper, rate.abs() + bandwidth, spec.panels, 16);
    let mut samples = Vec::with_capacity(nodes.len());
    for &(l, w) in &nodes {
        samples.push((l, w * weight_at(lower, l) * amp(l)? * Complex64::from_polar(1.0, rate * l)));
    }
    let values: Vec<Complex64> =
        ladder.iter().map(|&e| samples.iter().map(|&(l, g)| g * (-e * l).exp()).sum()).collect();
    let eps_sequence: Vec<(f64, Complex64)> = ladder.iter().copied().zip(values.iter().copied()).collect();
    if eps_min == 0.0 {
        let tail = amp(upper)?.norm() * 2.0 / (rate.abs() + bandwidth).max(1e-300);
        return Ok(OscillatoryValue { value: values[0], est_err: tail, eps_sequence });
    }
    let ex = richardson(&values, 2.0);
    let scale = ex.limit.norm().max(1.0);
    if !ex.settled() && ex.residuals.last().copied().unwrap_or(0.0) > 1e-9 * scale {
        return Err(Error::NonConvergence(format!("damping extrapolation residuals {:?}", ex.residuals)));
    }
    let truncation = samples.last().map(|s| s.1.norm()).unwrap_or(0.0) * (-eps_min * upper).exp() / eps_min;
    Ok(OscillatoryValue { value: ex.limit, est_err: ex.est_err + truncation + 1e-15 * scale, eps_sequence })
}

fn filon_rule(n: usize) -> &'static FilonRule {
    static R8: OnceLock<FilonRule> = OnceLock::new();
    static R6: OnceLock<FilonRule> = OnceLock::new();
    match n {
        8 => R8.get_or_init(|| FilonRule::new(8)),
        6 => R6.get_or_init(|| FilonRule::new(6)),
        _ => unreachable!("filon rules are 8- and 6-point"),
    }
}

/// `∫_a^b e^{iΩλ} A(λ) dλ` for `A` sampled at the rule's nodes.
fn filon_panel(rule: &FilonRule, a: f64, b: f64, omega: f64, amps: &[Complex64]) -> Complex64 {
    let half = 0.5 * (b - a);
    let w = rule.weights(Complex64::new(omega * half, 0.0));
    let s: Complex64 = w.iter().zip(amps).map(|(w, a)| w * a).sum();
    s * half * Complex64::from_polar(1.0, omega * 0.5 * (a + b))
}

fn panel_nodes(rule: &FilonRule, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
    rule.nodes.iter().map(move |x| a + 0.5 * (b - a) * (x + 1.0))
}

fn filon_integral<F: Fn(f64) -> Result<Complex64>>(
    amp: F,
    bandwidth: f64,
    rate: f64,
    spec: &QuadratureSpec,
    lower: Lower,
) -> Result<OscillatoryValue> {
    let upper = spec.cutoff_high;
    let (r8, r6) = (filon_rule(8), filon_rule(6));
    let mut edges = Vec::new();
    let start = match lower {
        Lower::Cutoff(low) => {
            for k in 0..=32 {
                edges.push(0.5 * low + 0.5 * low * k as f64 / 32.0);
            }
            low
        }
        Lower::Zero => {
            edges.push(0.0);
            0.0
        }
    };
    let width = if bandwidth > 0.0 { 0.5 / bandwidth } else { f64::INFINITY };
    let panels = spec.panels.max(((upper - start) / width).ceil() as usize);
    for k in 1..=panels {
        edges.push(start + (upper - start) * k as f64 / panels as f64);
    }
    let f = |l: f64| -> Result<Complex64> { Ok(weight_at(lower, l) * amp(l)?) };
    let (mut v8, mut v6) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for e in edges.windows(2) {
        let a8: Vec<Complex64> = panel_nodes(r8, e[0], e[1]).map(&f).collect::<Result<_>>()?;
        let a6: Vec<Complex64> = panel_nodes(r6, e[0], e[1]).map(&f).collect::<Result<_>>()?;
        v8 += filon_panel(r8, e[0], e[1], rate, &a8);
        v6 += filon_panel(r6, e[0], e[1], rate, &a6);
    }
    let mut tail_err = 0.0;
    if rate != 0.0 {
        // endpoint expansion of the tail, valid for a slowly varying amplitude
        let ic = Complex64::new(0.0, rate);
        let h = 1e-4 * upper;
        let a0 = f(upper)?;
        let d1 = (f(upper + h)? - f(upper - h)?) / (2.0 * h);
        let ph = Complex64::from_polar(1.0, rate * upper);
        let t1 = -a0 * ph / ic;
        let t2 = d1 * ph / (ic * ic);
        v8 += t1 + t2;
        v6 += t1 + t2;
        tail_err = t2.norm();
    } else {
        tail_err += f(upper)?.norm() * upper;
    }
    Ok(OscillatoryValue { value: v8, est_err: (v8 - v6).norm() + tail_err, eps_sequence: Vec::new() })
}

/// Regularized `∫ ρ(λ) amplitude(λ) e^{iλ·phase_rate} dλ`; `bandwidth`
/// bounds the oscillation rate of the amplitude itself.
pub fn oscillatory_quadrature<F: Fn(f64) -> Result<Complex64>>(
    amplitude: F,
    bandwidth: f64,
    phase_rate: f64,
    spec: &QuadratureSpec,
) -> Result<OscillatoryValue> {
    spec.validate()?;
    let lower = Lower::Cutoff(spec.cutoff_low);
    match spec.scheme {
        Scheme::DampedGauss => damped_integral(amplitude, bandwidth, phase_rate, spec, lower),
        Scheme::Filon => filon_integral(amplitude, bandwidth, phase_rate, spec, lower),
    }
}

/// `T_m = ∫_Λ^∞ e^{iΩλ} λ^{-m} dλ` for `m_min ≤ m ≤ m_max` (Abel sense for `m ≤ 1`).
fn tail_moments(omega: f64, big: f64, m_min: i32, m_max: i32) -> Vec<Complex64> {
    let z = Complex64::new(0.0, -omega * big);
    let lo = m_min.min(1);
    let mut t = vec![Complex64::new(0.0, 0.0); (m_max.max(1) - lo + 1) as usize];
    for m in 1..=m_max.max(1) {
        t[(m - lo) as usize] = big.powi(1 - m) * expint_e(m as u32, z);
    }
    let ph = Complex64::from_polar(1.0, omega * big);
    let io = Complex64::new(0.0, omega);
    for m in (lo..1).rev() {
        let next = t[(m + 1 - lo) as usize];
        t[(m - lo) as usize] = (-big.powi(-m) * ph + m as f64 * next) / io;
    }
    t.drain(..(m_min - lo) as usize);
    t.truncate((m_max - m_min + 1) as usize);
    t
}

#[derive(Debug, Clone)]
struct Channel {
    /// `σr + σ'r'`
    shift: f64,
    amp8: Vec<Vec<Complex64>>,
    amp6: Vec<Vec<Complex64>>,
    /// Coefficients of `λ^{p-1-k}` beyond the Filon range.
    tail: Vec<Complex64>,
}

/// Precomputed pieces of `I(τ) = ∫ w(λ) λ^p J_ν(λr) J_ν(λr') e^{iτλ} dλ`
/// with `w` the cutoff or 1, reusable across `τ` with `|τ| ≤ tau_max`.
#[derive(Debug, Clone)]
pub struct ModeIntegralPlan {
    pub nu: f64,
    pub r: f64,
    pub rp: f64,
    pub power: i32,
    pub tau_max: f64,
    direct: Vec<(f64, f64)>,
    direct_coarse: Vec<(f64, f64)>,
    edges: Vec<f64>,
    tail_start: f64,
    channels: Vec<Channel>,
}

impl ModeIntegralPlan {
    /// `cutoff_low = None` integrates from 0 without a cutoff.
    pub fn new(nu: f64, r: f64, rp: f64, power: i32, cutoff_low: Option<f64>, tau_max: f64) -> Result<Self> {
        if !(r > 0.0 && rp > 0.0) {
            return Err(Error::NonPositiveParameter("radius"));
        }
        if !(0..=2).contains(&power) {
            return Err(Error::BadSpec(format!("power {power} outside 0..=2")));
        }
        let lower = match cutoff_low {
            Some(low) => Lower::Cutoff(low),
            None => Lower::Zero,
        };
        let rmin = r.min(rp);
        let x_c = 2.0 * nu + 5.0;
        let lam_s = (x_c / rmin).max(cutoff_low.unwrap_or(0.0));
        let lam_f = (100f64.max(8.0 * nu * nu) / rmin).max(1.5 * lam_s);
        let rate = tau_max.abs() + r + rp;

        let amp_direct = |l: f64| -> Result<f64> {
            Ok(weight_at(lower, l) * l.powi(power) * bessel_j(nu, l * r)? * bessel_j(nu, l * rp)?)
        };
        let build = |order: usize| -> Result<Vec<(f64, f64)>> {
            gauss_nodes(lower, lam_s, rate, 8, order)
                .into_iter()
                .map(|(l, w)| Ok((l, w * amp_direct(l)?)))
                .collect()
        };
        let direct = build(16)?;
        let direct_coarse = build(12)?;

        let n_panels = ((lam_f / lam_s).ln() / PANEL_RATIO.ln()).ceil().max(1.0) as usize;
        let q = (lam_f / lam_s).powf(1.0 / n_panels as f64);
        let edges: Vec<f64> = (0..=n_panels).map(|k| lam_s * q.powi(k as i32)).collect();
        let edges_last = *edges.last().unwrap();

        let phi = nu * FRAC_PI_2 + FRAC_PI_4;
        let pref = 1.0 / (2.0 * PI * (r * rp).sqrt());
        let coef: Vec<f64> = (0..=TAIL_TERMS).map(|k| asymptotic_coefficient(nu, k)).collect();
        let mut channels = Vec::with_capacity(4);
        let (r8, r6) = (filon_rule(8), filon_rule(6));
        for &(s, sp) in &[(1.0f64, 1.0f64), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let phase = Complex64::from_polar(pref, -(s + sp) * phi);
            let h = |x: f64, sign: f64| -> Result<Complex64> {
                let v = reduced_hankel(nu, x)?;
                Ok(if sign > 0.0 { v } else { v.conj() })
            };
            let amp = |l: f64| -> Result<Complex64> { Ok(phase * l.powi(power - 1) * h(l * r, s)? * h(l * rp, sp)?) };
            let mut amp8 = Vec::with_capacity(n_panels);
            let mut amp6 = Vec::with_capacity(n_panels);
            for e in edges.windows(2) {
                amp8.push(panel_nodes(r8, e[0], e[1]).map(&amp).collect::<Result<Vec<_>>>()?);
                amp6.push(panel_nodes(r6, e[0], e[1]).map(&amp).collect::<Result<Vec<_>>>()?);
            }
            let ik = |sign: f64, k: usize| Complex64::new(0.0, sign).powu(k as u32);
            let tail: Vec<Complex64> = (0..=TAIL_TERMS)
                .map(|k| {
                    (0..=k)
                        .map(|i| {
                            let j = k - i;
                            ik(s, i) * ik(sp, j) * coef[i] * coef[j] / (r.powi(i as i32) * rp.powi(j as i32))
                        })
                        .sum::<Complex64>()
                        * phase
                })
                .collect();
            channels.push(Channel { shift: s * r + sp * rp, amp8, amp6, tail });
        }
        Ok(ModeIntegralPlan {
            nu,
            r,
            rp,
            power,
            tau_max: tau_max.abs(),
            direct,
            direct_coarse,
            edges,
            tail_start: edges_last,
            channels,
        })
    }

    /// `I(τ)` and an error estimate.
    pub fn evaluate(&self, tau: f64) -> Result<(Complex64, f64)> {
        if tau.abs() > self.tau_max * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::BadSpec(format!("tau {tau} beyond plan limit {}", self.tau_max)));
        }
        let sum = |nodes: &[(f64, f64)]| -> Complex64 {
            nodes.iter().map(|&(l, g)| g * Complex64::from_polar(1.0, tau * l)).sum()
        };
        let d16 = sum(&self.direct);
        let d12 = sum(&self.direct_coarse);
        let mut value = d16;
        let mut err = (d16 - d12).norm();
        let (r8, r6) = (filon_rule(8), filon_rule(6));
        let scale = tau.abs() + self.r + self.rp;
        for ch in &self.channels {
            let omega = tau + ch.shift;
            let (mut v8, mut v6) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (k, e) in self.edges.windows(2).enumerate() {
                v8 += filon_panel(r8, e[0], e[1], omega, &ch.amp8[k]);
                v6 += filon_panel(r6, e[0], e[1], omega, &ch.amp6[k]);
            }
            value += v8;
            err += (v8 - v6).norm();
            let m_min = 1 - self.power;
            let m_max = TAIL_TERMS as i32 + 1 - self.power;
            if omega.abs() <= 1e-13 * scale {
                if m_min <= 1 {
                    return Err(Error::RegimeViolation(format!(
                        "t on the singular support (channel frequency {omega:e})"
                    )));
                }
            }
            let t = tail_moments(omega, self.tail_start, m_min, m_max);
            let mut last = 0.0;
            for (k, c) in ch.tail.iter().enumerate() {
                let term = c * t[k];
                value += term;
                last = term.norm();
            }
            err += last;
        }
        Ok((value, err + 1e-15 * value.norm()))
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ModeKernelValue {
    pub t: f64,
    pub r: f64,
    pub rp: f64,
    pub value: Complex64,
    pub eps_sequence: Vec<(f64, Complex64)>,
    pub est_err: f64,
}

fn check_radii(t: f64, r: f64, rp: f64, spec: &QuadratureSpec) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveParameter("r"));
    }
    if !(rp > 0.0) {
        return Err(Error::NonPositiveParameter("r'"));
    }
    if !t.is_finite() {
        return Err(Error::BadSpec("t must be finite".into()));
    }
    if spec.front_margin > 0.0 {
        let near = (t.abs() - (r + rp)).abs().min((t.abs() - (r - rp).abs()).abs());
        if near < spec.front_margin {
            return Err(Error::RegimeViolation(format!("t = {t} within {} of a wave front", spec.front_margin)));
        }
    }
    Ok(())
}

fn product_amplitude(nu: f64, r: f64, rp: f64, power: i32) -> impl Fn(f64) -> Result<Complex64> {
    move |l: f64| Ok(Complex64::new(l.powi(power) * bessel_j(nu, l * r)? * bessel_j(nu, l * rp)?, 0.0))
}

/// `(rr')^α ∫ ρ(λ) e^{-itλ} J_ν(λr) J_ν(λr') λ^p dλ`; `p = 1` is the
/// half-wave kernel, `p = 2` its `i ∂_t`.
pub fn halfwave_mode_integral(
    geom: &ConeGeometry,
    mode: &Mode,
    t: f64,
    r: f64,
    rp: f64,
    power: i32,
    spec: &QuadratureSpec,
) -> Result<ModeKernelValue> {
    spec.validate()?;
    check_radii(t, r, rp, spec)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveParameter("t"));
    }
    let scale = (r * rp).powf(geom.alpha);
    let (value, est_err, eps_sequence) = match spec.scheme {
        Scheme::DampedGauss => {
            let v = damped_integral(
                product_amplitude(mode.nu, r, rp, power),
                r + rp,
                -t,
                spec,
                Lower::Cutoff(spec.cutoff_low),
            )?;
            (v.value, v.est_err, v.eps_sequence)
        }
        Scheme::Filon => {
            let plan = ModeIntegralPlan::new(mode.nu, r, rp, power, Some(spec.cutoff_low), t)?;
            let (v, e) = plan.evaluate(-t)?;
            (v, e, Vec::new())
        }
    };
    Ok(ModeKernelValue {
        t,
        r,
        rp,
        value: value * scale,
        est_err: est_err * scale,
        eps_sequence: eps_sequence.into_iter().map(|(e, v)| (e, v * scale)).collect(),
    })
}

pub fn halfwave_mode_kernel(
    geom: &ConeGeometry,
    mode: &Mode,
    t: f64,
    r: f64,
    rp: f64,
    spec: &QuadratureSpec,
) -> Result<ModeKernelValue> {
    halfwave_mode_integral(geom, mode, t, r, rp, 1, spec)
}

/// `(rr')^α ∫_0^∞ sin(tλ) J_ν(λr) J_ν(λr') dλ`, no low-frequency cutoff.
pub fn sine_mode_kernel(
    geom: &ConeGeometry,
    mode: &Mode,
    t: f64,
    r: f64,
    rp: f64,
    spec: &QuadratureSpec,
) -> Result<ModeKernelValue> {
    spec.validate()?;
    check_radii(t, r, rp, spec)?;
    let scale = (r * rp).powf(geom.alpha);
    if t == 0.0 {
        return Ok(ModeKernelValue { t, r, rp, value: Complex64::new(0.0, 0.0), eps_sequence: Vec::new(), est_err: 0.0 });
    }
    let (value, est_err, eps_sequence) = match spec.scheme {
        Scheme::DampedGauss => {
            let nu = mode.nu;
            let amp = move |l: f64| -> Result<Complex64> {
                Ok(Complex64::new((t * l).sin() * bessel_j(nu, l * r)? * bessel_j(nu, l * rp)?, 0.0))
            };
            let v = damped_integral(amp, t.abs() + r + rp, 0.0, spec, Lower::Zero)?;
            (v.value, v.est_err, v.eps_sequence)
        }
        Scheme::Filon => {
            let plan = ModeIntegralPlan::new(mode.nu, r, rp, 0, None, t.abs())?;
            let (v, e) = sine_from_plan(&plan, t)?;
            (Complex64::new(v, 0.0), e, Vec::new())
        }
    };
    Ok(ModeKernelValue {
        t,
        r,
        rp,
        value: value * scale,
        est_err: est_err * scale,
        eps_sequence: eps_sequence.into_iter().map(|(e, v)| (e, v * scale)).collect(),
    })
}

/// `∫ sin(tλ) ... dλ` from a `power = 0` plan without cutoff; the
/// imaginary residue of the two exponentials is folded into the error.
pub fn sine_from_plan(plan: &ModeIntegralPlan, t: f64) -> Result<(f64, f64)> {
    let (a, ea) = plan.evaluate(t)?;
    let (b, eb) = plan.evaluate(-t)?;
    let v = (a - b) / Complex64::new(0.0, 2.0);
    Ok((v.re, 0.5 * (ea + eb)))
}

/// Half-wave kernel for `ν = 1/2` from the elementary form of `J_{1/2}`.
pub fn halfwave_half_order_closed_form(alpha: f64, t: f64, r: f64, rp: f64, low: f64) -> Result<Complex64> {
    let (d, s) = (r - rp, r + rp);
    let f = |w: f64| cutoff_fourier(w, low);
    let sum = f(d - t)? + f(-d - t)? - f(s - t)? - f(-s - t)?;
    Ok((r * rp).powf(alpha - 0.5) / (2.0 * PI) * sum)
}

/// Sine kernel for `ν = 1/2`: `(rr')^{α-1/2}/2 · sgn t` on `|r - r'| < |t| < r + r'`.
pub fn sine_half_order_closed_form(alpha: f64, t: f64, r: f64, rp: f64) -> f64 {
    let sg = |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
    let bracket = sg(t + r - rp) + sg(t - r + rp) - sg(t + r + rp) - sg(t - r - rp);
    (r * rp).powf(alpha - 0.5) * 0.25 * bracket
}
