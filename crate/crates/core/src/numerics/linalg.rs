use num_complex::Complex64;

/// Least-squares solution of a small dense complex system by modified
/// Gram–Schmidt QR with one reorthogonalization pass.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coeffs: Vec<Complex64>,
    pub residual_norm: f64,
    /// max |R_ii| / min |R_ii| after column normalization.
    pub cond: f64,
}

/// `columns[k][i]` is entry (i, k) of the design matrix.
pub fn complex_lstsq(columns: &[Vec<Complex64>], rhs: &[Complex64]) -> LeastSquares {
    let n = columns.len();
    let m = rhs.len();
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300))
        .collect();
    let mut q: Vec<Vec<Complex64>> = columns
        .iter()
        .zip(&scales)
        .map(|(c, s)| c.iter().map(|z| z / s).collect())
        .collect();
    let mut r = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        for _pass in 0..2 {
            for j in 0..k {
                let dot: Complex64 = (0..m).map(|i| q[j][i].conj() * q[k][i]).sum();
                r[j * n + k] += dot;
                for i in 0..m {
                    let t = q[j][i] * dot;
                    q[k][i] -= t;
                }
            }
        }
        let nrm = q[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r[k * n + k] = Complex64::new(nrm, 0.0);
        if nrm > 0.0 {
            for z in q[k].iter_mut() {
                *z /= nrm;
            }
        }
    }
    let qtb: Vec<Complex64> = (0..n)
        .map(|k| (0..m).map(|i| q[k][i].conj() * rhs[i]).sum())
        .collect();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = qtb[k];
        for j in k + 1..n {
            s -= r[k * n + j] * x[j];
        }
        x[k] = s / r[k * n + k];
    }
    for (xk, s) in x.iter_mut().zip(&scales) {
        *xk /= s;
    }
    let residual_norm = (0..m)
        .map(|i| {
            let fit: Complex64 = (0..n).map(|k| columns[k][i] * x[k]).sum();
            (rhs[i] - fit).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    let diag: Vec<f64> = (0..n).map(|k| r[k * n + k].re).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    LeastSquares { coeffs: x, residual_norm, cond: dmax / dmin.max(1e-300) }
}

/// Singular values of a small real matrix (one-sided Jacobi), descending.
pub fn singular_values(columns: &[Vec<f64>]) -> Vec<f64> {
    let n = columns.len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|x| x * x).sum();
                let beta: f64 = a[q].iter().map(|x| x * x).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = a.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let xp = *x;
                    *x = c * xp - s * *y;
                    *y = s * xp + c * *y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut sv: Vec<f64> = a.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}
