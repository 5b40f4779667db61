use num_complex::Complex64;

/// Result of a Richardson table built from a geometric step ladder.
#[derive(Debug, Clone)]
pub struct Extrapolation {
    pub limit: Complex64,
    pub est_err: f64,
    /// `|T[k][k] - T[k-1][k-1]|` for k = 1..=L.
    pub residuals: Vec<f64>,
    /// Diagonal of the table, `T[k][k]`.
    pub diagonal: Vec<Complex64>,
}

impl Extrapolation {
    /// Residuals shrink along the ladder.
    pub fn settled(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= w[0] * 1.05 + 1e-300)
    }
}

/// Richardson extrapolation for `values[k] = F(h_0 / ratio^k)` with
/// `F(h) = F(0) + Σ c_m h^m`.
pub fn richardson(values: &[Complex64], ratio: f64) -> Extrapolation {
    assert!(!values.is_empty());
    let n = values.len();
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![values[k]];
        for m in 1..=k {
            let f = ratio.powi(m as i32);
            let prev = table[k - 1][m - 1];
            let cur = row[m - 1];
            row.push(cur + (cur - prev) / (f - 1.0));
        }
        table.push(row);
    }
    let diagonal: Vec<Complex64> = (0..n).map(|k| table[k][k]).collect();
    let residuals: Vec<f64> = diagonal.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let limit = diagonal[n - 1];
    let est_err = if n >= 2 {
        let last = &table[n - 1];
        (last[n - 1] - last[n - 2]).norm().max(residuals[n - 2])
    } else {
        f64::INFINITY
    };
    Extrapolation { limit, est_err, residuals, diagonal }
}

pub fn richardson_real(values: &[f64], ratio: f64) -> Extrapolation {
    let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    richardson(&v, ratio)
}
