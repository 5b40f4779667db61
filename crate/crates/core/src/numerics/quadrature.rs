use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared cached rule.
    pub fn cached(n: usize) -> std::sync::Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<GaussLegendre>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("gauss cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| std::sync::Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with `panels` equal Gauss–Legendre panels.
pub fn composite_gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, order: usize, mut f: F) -> f64 {
    let rule = GaussLegendre::cached(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// Adaptive Gauss–Kronrod-free bisection: compares a panel's 16-point value
/// with the sum of its halves.
pub fn adaptive_gauss<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: &F) -> f64 {
    fn rec<F: Fn(f64) -> f64>(a: f64, b: f64, whole: f64, tol: f64, depth: u32, rule: &GaussLegendre, f: &F) -> f64 {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, f);
        let right = rule.integrate(m, b, f);
        if depth == 0 || (left + right - whole).abs() <= tol {
            left + right
        } else {
            rec(a, m, left, 0.5 * tol, depth - 1, rule, f) + rec(m, b, right, 0.5 * tol, depth - 1, rule, f)
        }
    }
    let rule = GaussLegendre::cached(16);
    let whole = rule.integrate(a, b, f);
    rec(a, b, whole, tol, 40, &rule, f)
}

/// Moments `M_k = ∫_{-1}^{1} x^k e^{iκx} dx` for `k < n`.
pub fn oscillatory_moments(kappa: Complex64, n: usize) -> Vec<Complex64> {
    let i = Complex64::i();
    let mut m = vec![Complex64::new(0.0, 0.0); n];
    if kappa.norm() < 8.0 + n as f64 * 0.5 {
        let ik = i * kappa;
        for (k, mk) in m.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..200usize {
                if (k + j) % 2 == 0 {
                    acc += term * (2.0 / (k + j + 1) as f64);
                }
                term = term * ik / (j + 1) as f64;
                if term.norm() < 1e-18 * acc.norm().max(1e-300) && j > 4 {
                    break;
                }
            }
            *mk = acc;
        }
    } else {
        let ik = i * kappa;
        let ep = ik.exp();
        let em = (-ik).exp();
        m[0] = (ep - em) / ik;
        for k in 1..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            m[k] = (ep - em * sign) / ik - m[k - 1] * (k as f64) / ik;
        }
    }
    m
}

/// Filon-type panel rule: for nodes `x_j` of an n-point Gauss rule, the
/// weights `w_j(κ) = ∫ ℓ_j(x) e^{iκx} dx` of the interpolatory product rule.
#[derive(Debug, Clone)]
pub struct FilonRule {
    pub nodes: Vec<f64>,
    /// Row-major LU-free inverse of the transposed Vandermonde matrix.
    vt_inv: Vec<f64>,
    n: usize,
}

impl FilonRule {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(n);
        let nodes = gl.nodes.clone();
        // V^T[k][j] = x_j^k; invert by Gauss–Jordan.
        let mut a = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                a[k * n + j] = nodes[j].powi(k as i32);
            }
        }
        let vt_inv = invert(&a, n);
        Self { nodes, vt_inv, n }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Weights for the scaled frequency `κ`.
    pub fn weights(&self, kappa: Complex64) -> Vec<Complex64> {
        let m = oscillatory_moments(kappa, self.n);
        (0..self.n)
            .map(|j| (0..self.n).map(|k| m[k] * self.vt_inv[j * self.n + k]).sum())
            .collect()
    }
}

fn invert(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))
            .unwrap();
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        m[r * n + k] -= f * m[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn moments_agree_between_series_and_recurrence() {
        for &k in &[7.9, 8.1, 12.0] {
            let a = oscillatory_moments(Complex64::new(k, 0.01), 8);
            // brute force
            for (p, mp) in a.iter().enumerate() {
                let re = composite_gauss(-1.0, 1.0, 64, 16, |x| x.powi(p as i32) * (-(0.01) * x).exp() * (k * x).cos());
                let im = composite_gauss(-1.0, 1.0, 64, 16, |x| x.powi(p as i32) * (-(0.01) * x).exp() * (k * x).sin());
                assert!((mp.re - re).abs() < 1e-12, "k={k} p={p}");
                assert!((mp.im - im).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filon_rule_is_exact_for_low_degree_times_exponential() {
        let rule = FilonRule::new(8);
        for &kappa in &[0.3, 5.0, 40.0, 400.0] {
            let w = rule.weights(Complex64::new(kappa, 0.0));
            let approx: Complex64 = rule.nodes.iter().zip(&w).map(|(x, w)| w * x.powi(5)).sum();
            let exact = oscillatory_moments(Complex64::new(kappa, 0.0), 6)[5];
            assert!((approx - exact).norm() < 1e-11 * exact.norm().max(1e-3), "kappa={kappa}");
        }
    }
}
