//! The scattering matrix on a product cone.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bessel::bessel_pair;
use crate::cross_section::{ConeGeometry, Mode, PairClass};
use crate::error::{Error, Result};
use crate::numerics::extrapolate::richardson;
use crate::numerics::linalg::complex_lstsq;
use crate::numerics::ode::{dopri5, Tolerance};

/// Half-width of the band around `d_h = π` refused by kernel sums.
pub const DEFAULT_GUARD: f64 = 0.2;
const ABEL_RUNGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaSign {
    Plus,
    Minus,
}

impl LambdaSign {
    pub fn of(lambda: f64) -> Result<Self> {
        if lambda > 0.0 {
            Ok(LambdaSign::Plus)
        } else if lambda < 0.0 {
            Ok(LambdaSign::Minus)
        } else {
            Err(Error::NonPositiveParameter("|lambda|"))
        }
    }
}

/// `-i e^{-iπν}` for `λ > 0`, `+i e^{iπν}` for `λ < 0`.
pub fn scattering_eigenvalue_nu(nu: f64, sign: LambdaSign) -> Complex64 {
    match sign {
        LambdaSign::Plus => Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -PI * nu),
        LambdaSign::Minus => Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, PI * nu),
    }
}

pub fn scattering_eigenvalue(mode: &Mode, sign: LambdaSign) -> Complex64 {
    scattering_eigenvalue_nu(mode.nu, sign)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScatteringMatrix {
    pub lambda: f64,
    pub geometry: String,
    /// `(mode index, ν, S_j)`
    pub diag: Vec<(usize, f64, Complex64)>,
}

pub fn scattering_matrix(geom: &ConeGeometry, lambda: f64, count: usize) -> Result<ScatteringMatrix> {
    let sign = LambdaSign::of(lambda)?;
    let diag = geom.modes(count)?.iter().map(|m| (m.index, m.nu, scattering_eigenvalue(m, sign))).collect();
    Ok(ScatteringMatrix { lambda, geometry: geom.cross_section.label(), diag })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    BesselClosedForm,
    OdeIntegrated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    pub rtol: f64,
    pub points_per_period: usize,
    /// Amplitude of a `Y_ν` component added to the ODE initial data.
    pub y_admixture: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions { rtol: 1e-10, points_per_period: 64, y_admixture: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub lambda: f64,
    pub mode_index: usize,
    pub nu: f64,
    pub mu_sq: f64,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub source: Source,
}

/// Solution of `v'' + (n-1)/r v' + (λ² - μ²/r²) v = 0` regular at the tip,
/// normalized as `(λr)^{1-n/2} J_ν(λr)`.
pub fn radial_solution(geom: &ConeGeometry, mode: &Mode, lambda: f64, r_max: f64, source: Source) -> Result<RadialSolution> {
    radial_solution_with(geom, mode, lambda, r_max, source, &RadialOptions::default())
}

pub fn radial_solution_with(
    geom: &ConeGeometry,
    mode: &Mode,
    lambda: f64,
    r_max: f64,
    source: Source,
    opts: &RadialOptions,
) -> Result<RadialSolution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NonPositiveParameter("lambda"));
    }
    let nu = mode.nu;
    if !(r_max >= 50.0 * (nu + 1.0) / lambda) {
        return Err(Error::RegimeUnreachable(format!(
            "r_max = {r_max} below 50(nu+1)/lambda = {}",
            50.0 * (nu + 1.0) / lambda
        )));
    }
    let sigma = 1.0 - geom.n as f64 / 2.0;
    let r0 = (nu + 2.0) / lambda;
    let h = 2.0 * PI / (lambda * opts.points_per_period.max(8) as f64);
    let npts = ((r_max - r0) / h).ceil() as usize + 1;
    let h = (r_max - r0) / (npts - 1) as f64;
    let r_grid: Vec<f64> = (0..npts).map(|i| r0 + h * i as f64).collect();

    let closed = |r: f64, delta: f64| -> Result<(f64, f64)> {
        let x = lambda * r;
        let p = bessel_pair(nu, x)?;
        let (c, cp) = (p.j + delta * p.y, p.jp + delta * p.yp);
        let xs = x.powf(sigma);
        Ok((xs * c, lambda * (sigma * x.powf(sigma - 1.0) * c + xs * cp)))
    };

    let (values, derivatives) = match source {
        Source::BesselClosedForm => {
            let mut v = Vec::with_capacity(npts);
            let mut d = Vec::with_capacity(npts);
            for &r in &r_grid {
                let (a, b) = closed(r, 0.0)?;
                v.push(a);
                d.push(b);
            }
            (v, d)
        }
        Source::OdeIntegrated => {
            let (v0, d0) = closed(r0, opts.y_admixture)?;
            let n1 = geom.n as f64 - 1.0;
            let (l2, mu2) = (lambda * lambda, mode.mu_sq);
            let scale = v0.abs().max(d0.abs() / lambda).max(1e-300);
            let tol = Tolerance { rtol: opts.rtol, atol: opts.rtol * 1e-4 * scale, max_steps: 50 * npts + 10_000 };
            let ys = dopri5(|r, y: &[f64; 2]| [y[1], -n1 / r * y[1] - (l2 - mu2 / (r * r)) * y[0]], [v0, d0], &r_grid, tol)?;
            (ys.iter().map(|y| y[0]).collect(), ys.iter().map(|y| y[1]).collect())
        }
    };
    Ok(RadialSolution { lambda, mode_index: mode.index, nu, mu_sq: mode.mu_sq, r_grid, values, derivatives, source })
}

/// Largest ODE residual at interior grid points, with `v''` and `v'` from
/// sixth-order central differences of `v`, relative to `λ² max|v|`.
pub fn collocation_residual(sol: &RadialSolution, geom: &ConeGeometry) -> f64 {
    let v = &sol.values;
    let h = sol.r_grid[1] - sol.r_grid[0];
    let n1 = geom.n as f64 - 1.0;
    let d1 = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let d2 = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let l2 = sol.lambda * sol.lambda;
    let mut worst = 0.0f64;
    for i in 3..v.len().saturating_sub(3) {
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..7 {
            a += d1[k] * v[i + k - 3];
            b += d2[k] * v[i + k - 3];
        }
        let (vp, vpp) = (a / h, b / (h * h));
        let r = sol.r_grid[i];
        let res = vpp + n1 / r * vp + (l2 - sol.mu_sq / (r * r)) * v[i];
        worst = worst.max(res.abs() / (l2 * vmax));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InOutCoefficients {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub fit_residual: f64,
    pub cond: f64,
}

impl InOutCoefficients {
    pub fn ratio(&self) -> Complex64 {
        self.a_plus / self.a_minus
    }
}

/// In/out coefficients over the outer half `[r_max/2, r_max]` of the grid.
pub fn extract_in_out(sol: &RadialSolution, geom: &ConeGeometry) -> Result<InOutCoefficients> {
    let r_max = *sol.r_grid.last().unwrap();
    extract_in_out_window(sol, geom, 0.5 * r_max, r_max, 2)
}

/// Least-squares fit of `v r^{(n-1)/2}` by `e^{±iλr} r^{-k}`, `k ≤ order`.
pub fn extract_in_out_window(
    sol: &RadialSolution,
    geom: &ConeGeometry,
    r_lo: f64,
    r_hi: f64,
    order: usize,
) -> Result<InOutCoefficients> {
    let periods = (r_hi - r_lo) * sol.lambda / (2.0 * PI);
    if periods < 4.0 {
        return Err(Error::IllConditionedFit(format!("window holds {periods:.2} periods, need 4")));
    }
    let w = (geom.n as f64 - 1.0) / 2.0;
    let idx: Vec<usize> = (0..sol.r_grid.len()).filter(|&i| sol.r_grid[i] >= r_lo && sol.r_grid[i] <= r_hi).collect();
    let rhs: Vec<Complex64> = idx.iter().map(|&i| Complex64::new(sol.values[i] * sol.r_grid[i].powf(w), 0.0)).collect();
    let mut cols = Vec::with_capacity(2 * (order + 1));
    for k in 0..=order {
        for s in [1.0, -1.0] {
            cols.push(
                idx.iter()
                    .map(|&i| {
                        let r = sol.r_grid[i];
                        Complex64::from_polar((r_hi / r).powi(k as i32), s * sol.lambda * r)
                    })
                    .collect::<Vec<_>>(),
            );
        }
    }
    let fit = complex_lstsq(&cols, &rhs);
    if fit.cond > 1e8 {
        return Err(Error::IllConditionedFit(format!("design condition {:.3e}", fit.cond)));
    }
    let rms = (rhs.iter().map(|z| z.norm_sqr()).sum::<f64>() / rhs.len() as f64).sqrt();
    let resid = fit.residual_norm / (rhs.len() as f64).sqrt() / rms;
    if resid > 1e-4 {
        return Err(Error::IllConditionedFit(format!("relative fit residual {resid:.3e} exceeds 1e-4")));
    }
    Ok(InOutCoefficients { a_plus: fit.coeffs[0], a_minus: fit.coeffs[1], fit_residual: resid, cond: fit.cond })
}

/// `a_+/a_-` recovered from the numerically integrated radial equation.
pub fn scattering_eigenvalue_ode(geom: &ConeGeometry, mode: &Mode, lambda: f64, r_max: f64) -> Result<InOutCoefficients> {
    let sol = radial_solution(geom, mode, lambda, r_max, Source::OdeIntegrated)?;
    extract_in_out(&sol, geom)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AbelSum {
    pub value: Complex64,
    pub est_err: f64,
    /// `(ε, partial sum)` down the halving ladder.
    pub sequence: Vec<(f64, Complex64)>,
    pub modes_used: usize,
}

/// `Σ_j e^{-εν_j} c(ν_j) φ_j(θ)φ_j(θ')` over whole eigenspaces within the
/// first `j_max` modes, for `ε = abel_eps/2^k`, extrapolated to `ε = 0`.
pub fn abel_mode_sum<F: Fn(f64) -> Complex64>(
    geom: &ConeGeometry,
    theta: &[f64],
    theta_p: &[f64],
    abel_eps: f64,
    j_max: usize,
    guard: f64,
    coefficient: F,
) -> Result<AbelSum> {
    if !(abel_eps > 0.0) {
        return Err(Error::NonPositiveParameter("abel_eps"));
    }
    let cs = &geom.cross_section;
    match cs.classify_pair(theta, theta_p, guard)? {
        PairClass::StrictlyDiffractive => {}
        _ => {
            return Err(Error::GeometricPairRejected { distance: cs.geodesic_distance(theta, theta_p)? });
        }
    }
    if let Some(avail) = cs.available() {
        if j_max > avail {
            return Err(Error::TabulatedExhausted { requested: j_max, available: avail });
        }
    }
    let spaces: Vec<_> = cs.eigenspaces(j_max)?.into_iter().filter(|s| s.first + s.multiplicity <= j_max).collect();
    if spaces.is_empty() {
        return Err(Error::NonPositiveParameter("j_max"));
    }
    let proj = cs.projector_kernels(&spaces, theta, theta_p)?;
    let terms: Vec<(f64, Complex64)> =
        spaces.iter().zip(&proj).map(|(s, p)| {
            let nu = geom.nu_for(s.mu_sq);
            (nu, coefficient(nu) * *p)
        }).collect();
    let eps: Vec<f64> = (0..ABEL_RUNGS).map(|k| abel_eps / 2f64.powi(k as i32)).collect();
    let values: Vec<Complex64> =
        eps.iter().map(|&e| terms.iter().map(|&(nu, c)| c * (-e * nu).exp()).sum()).collect();
    let ex = richardson(&values, 2.0);
    let (nu_last, c_last) = *terms.last().unwrap();
    let truncation = c_last.norm() * (-eps[ABEL_RUNGS - 1] * nu_last).exp() / (1.0 - (-eps[ABEL_RUNGS - 1]).exp()).max(1e-300);
    let scale = ex.limit.norm().max(1e-300);
    if !ex.settled() && ex.residuals.last().copied().unwrap_or(0.0) > 1e-12 * scale.max(1.0) {
        return Err(Error::SumNotSettled(format!("Abel ladder residuals {:?}", ex.residuals)));
    }
    Ok(AbelSum {
        value: ex.limit,
        est_err: ex.est_err + truncation,
        sequence: eps.into_iter().zip(values).collect(),
        modes_used: spaces.last().map(|s| s.first + s.multiplicity).unwrap_or(0),
    })
}

/// Abel-regularized kernel `S(λ, θ, θ')` away from the geometric front.
pub fn scattering_kernel(
    geom: &ConeGeometry,
    sign: LambdaSign,
    theta: &[f64],
    theta_p: &[f64],
    abel_eps: f64,
    j_max: usize,
) -> Result<AbelSum> {
    abel_mode_sum(geom, theta, theta_p, abel_eps, j_max, DEFAULT_GUARD, |nu| scattering_eigenvalue_nu(nu, sign))
}
