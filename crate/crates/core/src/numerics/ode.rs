//! Adaptive Dormand–Prince 5(4) for small real systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

/// Integrates `y' = f(t, y)` from `t_out[0]` (where `y = y0`) and returns
/// the state at every entry of the increasing grid `t_out`.
pub fn dopri5<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: F,
    y0: [f64; N],
    t_out: &[f64],
    tol: Tolerance,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(t_out.len());
    out.push(y0);
    let mut t = t_out[0];
    let mut y = y0;
    let mut k0 = f(t, &y);
    let span = t_out[t_out.len() - 1] - t;
    let mut h = (span / 100.0).min(if t_out.len() > 1 { t_out[1] - t } else { span });
    let mut steps = 0usize;
    for &target in &t_out[1..] {
        while t < target {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::StiffnessFailure(format!("more than {} steps", tol.max_steps)));
            }
            let last = t + h >= target;
            let hh = if last { target - t } else { h };
            let mut k = [[0.0; N]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    for j in 0..s {
                        *yi += hh * A[s][j] * k[j][i];
                    }
                }
                k[s] = f(t + C[s] * hh, &ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += hh * d5;
                let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((hh * (d5 - d4) / sc).abs());
            }
            if !err.is_finite() {
                return Err(Error::StiffnessFailure("non-finite state".into()));
            }
            if err <= 1.0 {
                t = if last { target } else { t + hh };
                y = y5;
                k0 = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                h = hh * factor;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StiffnessFailure(format!("step size underflow at t = {t}")));
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.25).collect();
        let tol = Tolerance { rtol: 1e-11, atol: 1e-13, max_steps: 100_000 };
        let ys = dopri5(|_, y| [y[1], -y[0]], [0.0, 1.0], &grid, tol).unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-9, "t={t}");
            assert!((y[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn step_limit_reported() {
        let tol = Tolerance { rtol: 1e-12, atol: 1e-14, max_steps: 10 };
        let r = dopri5(|_, y| [y[1], -1e4 * y[0]], [0.0, 1.0], &[0.0, 100.0], tol);
        assert!(matches!(r, Err(Error::StiffnessFailure(_))));
    }
}
