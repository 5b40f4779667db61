//! Real-order Bessel and Hankel functions of positive real argument.
//!
//! Three evaluation paths:
//! * `z < 2`: Temme's series for `Y_μ`, `|μ| ≤ 1/2`, with `J` from the
//!   continued fraction for `J'/J` and the Wronskian.
//! * `2 ≤ z` below the asymptotic threshold: Steed's complex continued
//!   fraction for `(J'+iY')/(J+iY)`.
//! * `z ≥ max(30, ν²/8)`: the Hankel large-argument expansion, summed
//!   to its smallest term.
//!
//! Orders above the base `μ` are reached by downward recurrence for `J` and
//! upward recurrence for `Y`, both stable directions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: f64 = 200.0;
pub const MAX_ARGUMENT: f64 = 1e6;
pub const MAX_ASYMPTOTIC_TERMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Asymptotic,
    Recurrence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub nu: f64,
    pub z: f64,
    pub value: f64,
    pub method: Method,
    pub est_abs_err: f64,
}

/// `J_ν`, `Y_ν` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
    pub method: Method,
    pub est_rel_err: f64,
}

// Taylor coefficients of 1/Γ(x) about 0 (c_1 = 1, c_2 = γ, ...).
const RGAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.577_215_664_901_532_860_606_5,
    -0.655_878_071_520_253_881_077,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_501_7,
    -0.042_197_734_555_544_336_748_21,
    -0.009_621_971_527_876_973_562_115,
    0.007_218_943_246_663_099_542_395,
    -0.001_165_167_591_859_065_112_114,
    -0.000_215_241_674_114_950_972_815_7,
    0.000_128_050_282_388_116_186_153_2,
    -0.000_020_134_854_780_788_238_655_69,
    -0.000_001_250_493_482_142_670_657_345,
    0.000_001_133_027_231_981_695_882_374,
    -2.056_338_416_977_607_103_45e-7,
    6.116_095_104_481_415_817_862e-9,
    5.002_007_644_469_222_930_056e-9,
    -1.181_274_570_487_020_144_588e-9,
    1.043_426_711_691_100_510_492e-10,
    7.782_263_439_905_071_254_05e-12,
    -3.696_805_618_642_205_708_188e-12,
    5.100_370_287_454_475_979_015e-13,
    -2.058_326_053_566_506_783_222e-14,
    -5.348_122_539_423_017_982_37e-15,
    1.226_778_628_238_260_790_159e-15,
    -1.181_259_301_697_458_769_514e-16,
    1.186_692_254_751_600_332_58e-18,
    1.412_380_655_318_031_781_556e-18,
];

/// `(gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ))` for `|μ| ≤ 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut p = 1.0;
    for pair in RGAMMA_TAYLOR.chunks(2) {
        gam2 += pair[0] * p;
        if pair.len() > 1 {
            gam1 -= pair[1] * p;
        }
        p *= mu2;
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

fn check_envelope(nu: f64, z: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&nu) || !(z > 0.0 && z <= MAX_ARGUMENT) || !nu.is_finite() {
        return Err(Error::OutOfEnvelope { nu, z });
    }
    Ok(())
}

/// Whether `(ν, z)` is served by the large-argument expansion.
pub fn in_asymptotic_regime(nu: f64, z: f64) -> bool {
    z >= 30f64.max(nu * nu / 8.0)
}

/// Large-argument coefficient `a_k(ν)`.
pub fn asymptotic_coefficient(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    for m in 1..=k {
        let odd = (2 * m - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * m as f64);
    }
    a
}

/// `P + iQ` with `H^{(1)}_ν(z) = sqrt(2/(πz)) e^{iω} (P + iQ)`, summed to the
/// smallest term. Returns the sum and the size of the first omitted term.
fn hankel_series_sum(nu: f64, z: f64) -> Option<(Complex64, f64)> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut last = 1.0f64;
    for k in 1..400usize {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * z);
        if next == 0.0 {
            return Some((Complex64::new(p, q), 0.0));
        }
        if next.abs() > last && k > 2 {
            break;
        }
        // i^k a_k / z^k: k ≡ 1 → +Q, 2 → −P, 3 → −Q, 0 → +P
        match k % 4 {
            0 => p += next,
            1 => q += next,
            2 => p -= next,
            _ => q -= next,
        }
        last = next.abs();
        term = next;
        if last < 1e-17 * p.abs().max(q.abs()) {
            return Some((Complex64::new(p, q), last));
        }
    }
    if last < 1e-14 {
        Some((Complex64::new(p, q), last))
    } else {
        None
    }
}

fn asymptotic_jy(nu: f64, z_hi: f64, z_lo: f64) -> Option<(f64, f64, f64, f64, f64)> {
    let z = z_hi + z_lo;
    let (pq, tail) = hankel_series_sum(nu, z)?;
    let delta = z_lo - (nu * FRAC_PI_2 + FRAC_PI_4);
    let (sh, ch) = z_hi.sin_cos();
    let (sd, cd) = delta.sin_cos();
    let cos_w = ch * cd - sh * sd;
    let sin_w = sh * cd + ch * sd;
    let amp = (2.0 / (PI * z)).sqrt();
    let j = amp * (pq.re * cos_w - pq.im * sin_w);
    let y = amp * (pq.re * sin_w + pq.im * cos_w);
    Some((j, y, cos_w, sin_w, tail))
}

fn asymptotic_pair(nu: f64, z_hi: f64, z_lo: f64) -> Option<BesselPair> {
    let z = z_hi + z_lo;
    let (j, y, cos_w, sin_w, tail) = asymptotic_jy(nu, z_hi, z_lo)?;
    let amp = (2.0 / (PI * z)).sqrt();
    // derivative from the order-(ν+1) sum: C'_ν = (ν/z) C_ν − C_{ν+1}
    let (pq1, _) = hankel_series_sum(nu + 1.0, z)?;
    // e^{iω_{ν+1}} = -i e^{iω_ν}
    let j1 = amp * (pq1.re * sin_w + pq1.im * cos_w);
    let y1 = amp * (-pq1.re * cos_w + pq1.im * sin_w);
    Some(BesselPair {
        j,
        y,
        jp: nu / z * j - j1,
        yp: nu / z * y - y1,
        method: Method::Asymptotic,
        est_rel_err: tail.max(4e-16),
    })
}

/// Temme / Steed evaluation of `J_ν, Y_ν, J'_ν, Y'_ν`.
fn continued_fraction_pair(xnu: f64, x: f64) -> Result<BesselPair> {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const XMIN: f64 = 2.0;
    const MAXIT: usize = 2_000_000;
    const BIG: f64 = 1e250;

    let nl: usize = if x < XMIN {
        (xnu + 0.5) as usize
    } else {
        ((xnu - x + 1.5).max(0.0)) as usize
    };
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν / J_ν
    let mut isign = 1.0f64;
    let mut h = (xnu * xi).max(FPMIN);
    let mut b = xi2 * xnu;
    let mut d = 0.0f64;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!("bessel CF1 at nu={xnu}, z={x}")));
    }

    // downward recurrence ν → μ, rescaling to stay in range
    let mut rjl = isign * 1e-100;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut log_scale = 0.0f64;
    let mut fact = xnu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > BIG || rjpl.abs() > BIG {
            rjl /= BIG;
            rjpl /= BIG;
            log_scale += BIG.ln();
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, rymu, ry1, method) = if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let ee = e.exp();
        let mut p = ee / (gampl * PI);
        let mut q = 1.0 / (ee * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let dd = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence(format!("temme series at nu={xnu}, z={x}")));
        }
        let rymu = -sum;
        let ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        let rjmu = w / (rymup - f * rymu);
        (rjmu, rymu, ry1, Method::Series)
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 1..MAXIT {
            a += 2.0 * i as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di = -di / den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() <= EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::NonConvergence(format!("steed CF2 at nu={xnu}, z={x}")));
        }
        let gam = (p - f) / q;
        let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
        let rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        let ry1 = xmu * xi * rymu - rymup;
        (rjmu, rymu, ry1, Method::Recurrence)
    };

    // rescale J back to order ν
    let fact = rjmu / rjl;
    let unscale = (-log_scale).exp();
    let rj = rjl1 * fact * unscale;
    let rjp = rjp1 * fact * unscale;
    let mut rymu = rymu;
    let mut ry1 = ry1;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    let ry = rymu;
    let ryp = xnu * xi * rymu - ry1;
    Ok(BesselPair { j: rj, y: ry, jp: rjp, yp: ryp, method, est_rel_err: 1e-15 })
}

/// `J_ν, Y_ν` and derivatives.
pub fn bessel_pair(nu: f64, z: f64) -> Result<BesselPair> {
    check_envelope(nu, z)?;
    if in_asymptotic_regime(nu, z) {
        if let Some(p) = asymptotic_pair(nu, z, 0.0) {
            return Ok(p);
        }
    }
    continued_fraction_pair(nu, z)
}

/// Like [`bessel_pair`] for an argument given as an unevaluated sum
/// `z_hi + z_lo`; the oscillatory phase keeps the tail `z_lo`.
pub fn bessel_pair_split(nu: f64, z_hi: f64, z_lo: f64) -> Result<BesselPair> {
    check_envelope(nu, z_hi)?;
    if in_asymptotic_regime(nu, z_hi) {
        if let Some(p) = asymptotic_pair(nu, z_hi, z_lo) {
            return Ok(p);
        }
    }
    let mut p = continued_fraction_pair(nu, z_hi)?;
    // first-order correction for the tail
    p.j += p.jp * z_lo;
    p.y += p.yp * z_lo;
    Ok(p)
}

pub fn bessel_j_eval(nu: f64, z: f64) -> Result<BesselEval> {
    let p = bessel_pair(nu, z)?;
    Ok(BesselEval {
        nu,
        z,
        value: p.j,
        method: p.method,
        est_abs_err: p.est_rel_err * p.j.abs().max((2.0 / (PI * z)).sqrt().min(1.0) * 1e-3),
    })
}

fn jy(nu: f64, z: f64) -> Result<(f64, f64)> {
    check_envelope(nu, z)?;
    if in_asymptotic_regime(nu, z) {
        if let Some((j, y, ..)) = asymptotic_jy(nu, z, 0.0) {
            return Ok((j, y));
        }
    }
    let p = continued_fraction_pair(nu, z)?;
    Ok((p.j, p.y))
}

pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    Ok(jy(nu, z)?.0)
}

pub fn bessel_y(nu: f64, z: f64) -> Result<f64> {
    Ok(jy(nu, z)?.1)
}

pub fn hankel1(nu: f64, z: f64) -> Result<Complex64> {
    let (j, y) = jy(nu, z)?;
    Ok(Complex64::new(j, y))
}

pub fn hankel2(nu: f64, z: f64) -> Result<Complex64> {
    Ok(hankel1(nu, z)?.conj())
}

/// Slowly varying Hankel amplitude `h_ν(z) = sqrt(πz/2) e^{-iω} H^{(1)}_ν(z)`,
/// `ω = z − νπ/2 − π/4`; `h_ν(z) → 1` as `z → ∞`.
pub fn reduced_hankel(nu: f64, z: f64) -> Result<Complex64> {
    check_envelope(nu, z)?;
    if in_asymptotic_regime(nu, z) {
        if let Some((pq, _)) = hankel_series_sum(nu, z) {
            return Ok(pq);
        }
    }
    let p = continued_fraction_pair(nu, z)?;
    let omega = z - nu * FRAC_PI_2 - FRAC_PI_4;
    Ok(Complex64::new(p.j, p.y) * (PI * z / 2.0).sqrt() * Complex64::new(0.0, -omega).exp())
}

/// Truncated large-argument expansion
/// `sqrt(2/(πz)) e^{iω} Σ_{k<K} i^k a_k(ν) / z^k`.
pub fn hankel_asymptotic(nu: f64, z: f64, terms: usize) -> Result<Complex64> {
    if !(z > nu) {
        return Err(Error::RegimeViolation(format!("hankel_asymptotic needs z > nu (nu = {nu}, z = {z})")));
    }
    if terms > MAX_ASYMPTOTIC_TERMS || terms == 0 {
        return Err(Error::RegimeViolation(format!("term count {terms} outside 1..={MAX_ASYMPTOTIC_TERMS}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ik = Complex64::new(1.0, 0.0);
    for k in 0..terms {
        sum += ik * asymptotic_coefficient(nu, k) / z.powi(k as i32);
        ik *= Complex64::i();
    }
    let omega = z - nu * FRAC_PI_2 - FRAC_PI_4;
    Ok((2.0 / (PI * z)).sqrt() * Complex64::new(0.0, omega).exp() * sum)
}
