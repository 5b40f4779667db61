//! Spectral models of the cross section `N`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quadrature::GaussLegendre;

/// Pairs closer than this to the antipodal distance count as geometric.
pub const GEOMETRIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossSectionSpec {
    Circle { circumference: f64 },
    Interval { length: f64, boundary: Boundary },
    Sphere2,
    /// Contents of an `N-TABLE v1` file.
    Tabulated { text: String },
}

#[derive(Debug, Clone, PartialEq)]
struct Tabulated {
    extent: f64,
    mu_sq: Vec<f64>,
    samples: Vec<Vec<f64>>,
    // trigonometric interpolant: value = Σ_k a_k cos(kωθ) + b_k sin(kωθ)
    cos_coef: Vec<Vec<f64>>,
    sin_coef: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Circle { rho: f64 },
    Interval { length: f64, boundary: Boundary },
    Sphere2,
    Tabulated(Tabulated),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    kind: Kind,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PairClass {
    Geometric,
    StrictlyDiffractive,
    GuardBand,
}

/// A maximal block of consecutive modes sharing one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenspace {
    pub mu_sq: f64,
    pub first: usize,
    pub multiplicity: usize,
}

pub fn build_cross_section(spec: &CrossSectionSpec) -> Result<CrossSection> {
    let positive = |x: f64, name: &'static str| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::NonPositiveParameter(name))
        }
    };
    let (kind, dim) = match spec {
        CrossSectionSpec::Circle { circumference } => {
            positive(*circumference, "circumference")?;
            (Kind::Circle { rho: *circumference }, 1)
        }
        CrossSectionSpec::Interval { length, boundary } => {
            positive(*length, "length")?;
            (Kind::Interval { length: *length, boundary: *boundary }, 1)
        }
        CrossSectionSpec::Sphere2 => (Kind::Sphere2, 2),
        CrossSectionSpec::Tabulated { text } => (Kind::Tabulated(parse_table(text)?), 1),
    };
    Ok(CrossSection { kind, dim })
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedTabulatedData(msg.into())
}

fn parse_table(text: &str) -> Result<Tabulated> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| malformed("empty file"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("N-TABLE") || fields.next() != Some("v1") {
        return Err(malformed("header must start with `N-TABLE v1`"));
    }
    let (mut dim, mut count, mut grid, mut extent) = (None, None, None, 2.0 * PI);
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| malformed(format!("bad header field `{f}`")))?;
        match k {
            "dim" => dim = v.parse::<usize>().ok(),
            "count" => count = v.parse::<usize>().ok(),
            "grid" => grid = v.parse::<usize>().ok(),
            "extent" => extent = v.parse::<f64>().map_err(|_| malformed("bad extent"))?,
            _ => return Err(malformed(format!("unknown header field `{k}`"))),
        }
    }
    let dim = dim.ok_or_else(|| malformed("missing dim"))?;
    let count = count.ok_or_else(|| malformed("missing count"))?;
    let grid = grid.ok_or_else(|| malformed("missing grid"))?;
    if dim != 1 {
        return Err(malformed(format!("only dim=1 periodic tables are supported, got dim={dim}")));
    }
    if count == 0 || grid < 2 || !(extent > 0.0 && extent.is_finite()) {
        return Err(malformed("count, grid and extent must be positive"));
    }

    let mut tokens = lines.flat_map(str::split_whitespace);
    let mut entries: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for b in 0..count {
        let tag = tokens.next().ok_or_else(|| malformed(format!("expected {count} blocks, found {b}")))?;
        let mu2: f64 = tag
            .strip_prefix("mu2=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| malformed(format!("block {b}: expected `mu2=<float>`, got `{tag}`")))?;
        if !(mu2 >= 0.0 && mu2.is_finite()) {
            return Err(malformed(format!("block {b}: eigenvalue {mu2} is not a finite nonnegative number")));
        }
        let mut samples = Vec::with_capacity(grid);
        for i in 0..grid {
            let t = tokens.next().ok_or_else(|| malformed(format!("block {b}: {i} of {grid} samples")))?;
            samples.push(t.parse::<f64>().map_err(|_| malformed(format!("block {b}: bad sample `{t}`")))?);
        }
        entries.push((mu2, samples));
    }
    if let Some(t) = tokens.next() {
        return Err(malformed(format!("trailing data `{t}` after {count} blocks")));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zeros = entries.iter().filter(|e| e.0 < 1e-12).count();
    if zeros > 1 {
        return Err(malformed(format!("{zeros} zero eigenvalues: N must be connected")));
    }

    let h = extent / grid as f64;
    for i in 0..count {
        for j in 0..=i {
            let g: f64 = entries[i].1.iter().zip(&entries[j].1).map(|(a, b)| a * b).sum::<f64>() * h;
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - want).abs() > 1e-8 {
                return Err(malformed(format!("eigenfunctions {j} and {i} are not orthonormal (gram {g})")));
            }
        }
    }

    let kmax = grid / 2;
    let mut cos_coef = Vec::with_capacity(count);
    let mut sin_coef = Vec::with_capacity(count);
    for (_, s) in &entries {
        let mut a = vec![0.0; kmax + 1];
        let mut bb = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let (mut ca, mut cb) = (0.0, 0.0);
            for (i, &v) in s.iter().enumerate() {
                let ph = 2.0 * PI * (k * i % grid) as f64 / grid as f64;
                ca += v * ph.cos();
                cb += v * ph.sin();
            }
            let nyquist = grid % 2 == 0 && k == kmax;
            let scale = if k == 0 || nyquist { 1.0 } else { 2.0 } / grid as f64;
            a[k] = ca * scale;
            bb[k] = if nyquist { 0.0 } else { cb * scale };
        }
        cos_coef.push(a);
        sin_coef.push(bb);
    }
    Ok(Tabulated {
        extent,
        mu_sq: entries.iter().map(|e| e.0).collect(),
        samples: entries.into_iter().map(|e| e.1).collect(),
        cos_coef,
        sin_coef,
    })
}

/// Orthonormalized associated Legendre function `P̄_l^m(x)`, without
/// the Condon–Shortley phase.
pub fn normalized_legendre(l: usize, m: usize, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= s * ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * ((2 * m + 3) as f64).sqrt() * pmm;
    for ll in (m + 2)..=l {
        let a = |l: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
        let next = a(ll) * (x * p - p_prev / a(ll - 1));
        p_prev = p;
        p = next;
    }
    p
}

/// Legendre polynomial `P_l(x)`.
pub fn legendre(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for k in 1..l {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn sphere_index(j: usize) -> (usize, i64) {
    let mut l = (j as f64).sqrt() as usize;
    while l * l > j {
        l -= 1;
    }
    while (l + 1) * (l + 1) <= j {
        l += 1;
    }
    (l, j as i64 - (l * l + l) as i64)
}

impl CrossSection {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Circle { rho } => format!("circle(circumference={rho})"),
            Kind::Interval { length, boundary } => format!("interval(length={length}, {boundary:?})"),
            Kind::Sphere2 => "sphere2".into(),
            Kind::Tabulated(t) => format!("tabulated(count={}, grid={})", t.mu_sq.len(), t.samples[0].len()),
        }
    }

    /// Number of available modes, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match &self.kind {
            Kind::Tabulated(t) => Some(t.mu_sq.len()),
            _ => None,
        }
    }

    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Circle { rho } => {
                let k = (j + 1) / 2;
                let mu = 2.0 * PI * k as f64 / rho;
                mu * mu
            }
            Kind::Interval { length, boundary } => {
                let k = match boundary {
                    Boundary::Dirichlet => j + 1,
                    Boundary::Neumann => j,
                };
                let mu = PI * k as f64 / length;
                mu * mu
            }
            Kind::Sphere2 => {
                let (l, _) = sphere_index(j);
                (l * (l + 1)) as f64
            }
            Kind::Tabulated(t) => *t
                .mu_sq
                .get(j)
                .ok_or(Error::TabulatedExhausted { requested: j + 1, available: t.mu_sq.len() })?,
        })
    }

    fn check_chart(&self, theta: &[f64]) -> Result<()> {
        let bad = |msg: String| Err(Error::OutOfChart(msg));
        if theta.len() != self.dim || theta.iter().any(|x| !x.is_finite()) {
            return bad(format!("expected {} finite coordinates, got {theta:?}", self.dim));
        }
        match &self.kind {
            Kind::Circle { rho } if !(0.0..=*rho).contains(&theta[0]) => bad(format!("{} not in [0, {rho}]", theta[0])),
            Kind::Interval { length, .. } if !(0.0..=*length).contains(&theta[0]) => {
                bad(format!("{} not in [0, {length}]", theta[0]))
            }
            Kind::Tabulated(t) if !(0.0..=t.extent).contains(&theta[0]) => {
                bad(format!("{} not in [0, {}]", theta[0], t.extent))
            }
            Kind::Sphere2 if !(0.0..=PI).contains(&theta[0]) || !(0.0..=2.0 * PI).contains(&theta[1]) => {
                bad(format!("(polar, azimuth) = {theta:?} outside [0, π] × [0, 2π]"))
            }
            _ => Ok(()),
        }
    }

    /// Value of the `j`-th real orthonormal eigenfunction at `theta`.
    pub fn eigenfunction(&self, j: usize, theta: &[f64]) -> Result<f64> {
        self.check_chart(theta)?;
        Ok(match &self.kind {
            Kind::Circle { rho } => {
                let k = (j + 1) / 2;
                if k == 0 {
                    1.0 / rho.sqrt()
                } else {
                    let ph = 2.0 * PI * k as f64 * theta[0] / rho;
                    let amp = (2.0 / rho).sqrt();
                    if j % 2 == 1 {
                        amp * ph.cos()
                    } else {
                        amp * ph.sin()
                    }
                }
            }
            Kind::Interval { length, boundary } => match boundary {
                Boundary::Dirichlet => (2.0 / length).sqrt() * (PI * (j + 1) as f64 * theta[0] / length).sin(),
                Boundary::Neumann if j == 0 => 1.0 / length.sqrt(),
                Boundary::Neumann => (2.0 / length).sqrt() * (PI * j as f64 * theta[0] / length).cos(),
            },
            Kind::Sphere2 => {
                let (l, m) = sphere_index(j);
                let p = normalized_legendre(l, m.unsigned_abs() as usize, theta[0].cos());
                let mf = m.unsigned_abs() as f64;
                match m.signum() {
                    0 => p,
                    1 => 2f64.sqrt() * p * (mf * theta[1]).cos(),
                    _ => 2f64.sqrt() * p * (mf * theta[1]).sin(),
                }
            }
            Kind::Tabulated(t) => {
                let a = t.cos_coef.get(j).ok_or(Error::TabulatedExhausted { requested: j + 1, available: t.mu_sq.len() })?;
                let b = &t.sin_coef[j];
                let w = 2.0 * PI / t.extent;
                a.iter()
                    .zip(b)
                    .enumerate()
                    .map(|(k, (ak, bk))| {
                        let (s, c) = (k as f64 * w * theta[0]).sin_cos();
                        ak * c + bk * s
                    })
                    .sum()
            }
        })
    }

    pub fn geodesic_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_chart(a)?;
        self.check_chart(b)?;
        Ok(match &self.kind {
            Kind::Circle { rho } => periodic_distance(a[0], b[0], *rho),
            Kind::Tabulated(t) => periodic_distance(a[0], b[0], t.extent),
            Kind::Interval { .. } => (a[0] - b[0]).abs(),
            Kind::Sphere2 => {
                let v = |p: &[f64]| [p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin(), p[0].cos()];
                let (u, w) = (v(a), v(b));
                let dot = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
                let cross = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
                let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
                cn.atan2(dot)
            }
        })
    }

    pub fn classify_pair(&self, a: &[f64], b: &[f64], guard: f64) -> Result<PairClass> {
        if !(guard > 0.0) {
            return Err(Error::NonPositiveParameter("guard"));
        }
        let gap = (self.geodesic_distance(a, b)? - PI).abs();
        Ok(if gap <= GEOMETRIC_TOLERANCE {
            PairClass::Geometric
        } else if gap < guard {
            PairClass::GuardBand
        } else {
            PairClass::StrictlyDiffractive
        })
    }

    /// Eigenspaces covering at least the first `count` modes.
    pub fn eigenspaces(&self, count: usize) -> Result<Vec<Eigenspace>> {
        let mut out: Vec<Eigenspace> = Vec::new();
        let mut j = 0;
        while j < count {
            let mu_sq = self.eigenvalue(j)?;
            let mut m = 1;
            loop {
                match self.eigenvalue(j + m) {
                    Ok(v) if (v - mu_sq).abs() <= 1e-12 * mu_sq.max(1.0) => m += 1,
                    _ => break,
                }
            }
            out.push(Eigenspace { mu_sq, first: j, multiplicity: m });
            j += m;
        }
        Ok(out)
    }

    /// `Σ φ_i(a) φ_i(b)` over one eigenspace.
    pub fn projector_kernel(&self, space: &Eigenspace, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_chart(a)?;
        self.check_chart(b)?;
        match &self.kind {
            Kind::Circle { rho } => {
                let k = (space.first + 1) / 2;
                if k == 0 {
                    return Ok(1.0 / rho);
                }
                Ok(2.0 / rho * (2.0 * PI * k as f64 * (a[0] - b[0]) / rho).cos())
            }
            Kind::Sphere2 => {
                let (l, _) = sphere_index(space.first);
                let gamma = self.geodesic_distance(a, b)?;
                Ok((2 * l + 1) as f64 / (4.0 * PI) * legendre(l, gamma.cos()))
            }
            _ => {
                let mut s = 0.0;
                for i in space.first..space.first + space.multiplicity {
                    s += self.eigenfunction(i, a)? * self.eigenfunction(i, b)?;
                }
                Ok(s)
            }
        }
    }

    /// [`projector_kernel`](Self::projector_kernel) for a run of eigenspaces,
    /// using the Legendre recurrence on the sphere.
    pub fn projector_kernels(&self, spaces: &[Eigenspace], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        if let Kind::Sphere2 = self.kind {
            let x = self.geodesic_distance(a, b)?.cos();
            let lmax = spaces.iter().map(|s| sphere_index(s.first).0).max().unwrap_or(0);
            let mut p = Vec::with_capacity(lmax + 1);
            p.push(1.0);
            if lmax >= 1 {
                p.push(x);
            }
            for k in 1..lmax {
                p.push(((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64);
            }
            return Ok(spaces
                .iter()
                .map(|s| {
                    let l = sphere_index(s.first).0;
                    (2 * l + 1) as f64 / (4.0 * PI) * p[l]
                })
                .collect());
        }
        spaces.iter().map(|s| self.projector_kernel(s, a, b)).collect()
    }

    /// Quadrature nodes and weights on `N`, exact for the first `resolution`
    /// eigenfunction products.
    pub fn quadrature(&self, resolution: usize) -> Vec<(Vec<f64>, f64)> {
        let res = resolution.max(2);
        match &self.kind {
            Kind::Circle { rho } => periodic_rule(*rho, res + 2),
            Kind::Tabulated(t) => periodic_rule(t.extent, t.samples[0].len()),
            Kind::Interval { length, .. } => {
                let g = GaussLegendre::new(2 * res + 32);
                g.nodes
                    .iter()
                    .zip(&g.weights)
                    .map(|(x, w)| (vec![0.5 * length * (x + 1.0)], 0.5 * length * w))
                    .collect()
            }
            Kind::Sphere2 => {
                let g = GaussLegendre::new(res + 2);
                let naz = 2 * res + 2;
                let mut out = Vec::with_capacity(g.nodes.len() * naz);
                for (x, w) in g.nodes.iter().zip(&g.weights) {
                    for k in 0..naz {
                        let az = 2.0 * PI * k as f64 / naz as f64;
                        out.push((vec![x.acos(), az], w * 2.0 * PI / naz as f64));
                    }
                }
                out
            }
        }
    }
}

fn periodic_rule(extent: f64, n: usize) -> Vec<(Vec<f64>, f64)> {
    (0..n).map(|i| (vec![extent * i as f64 / n as f64], extent / n as f64)).collect()
}

fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(period);
    d.min(period - d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeGeometry {
    pub n: usize,
    pub cross_section: Arc<CrossSection>,
    pub alpha: f64,
}

impl ConeGeometry {
    pub fn new(n: usize, cross_section: CrossSection) -> Result<Self> {
        if n != cross_section.dim() + 1 {
            return Err(Error::BadSpec(format!(
                "cone dimension n={n} does not match cross-section dimension {}",
                cross_section.dim()
            )));
        }
        Ok(ConeGeometry { n, alpha: -((n as f64) - 2.0) / 2.0, cross_section: Arc::new(cross_section) })
    }

    pub fn nu_for(&self, mu_sq: f64) -> f64 {
        (mu_sq + self.alpha * self.alpha).sqrt()
    }

    /// First `count` modes, ordered by eigenvalue then index.
    pub fn modes(&self, count: usize) -> Result<Vec<Mode>> {
        if count == 0 {
            return Err(Error::NonPositiveParameter("count"));
        }
        if let Some(avail) = self.cross_section.available() {
            if count > avail {
                return Err(Error::TabulatedExhausted { requested: count, available: avail });
            }
        }
        (0..count)
            .map(|j| {
                let mu_sq = self.cross_section.eigenvalue(j)?;
                Ok(Mode { index: j, mu_sq, nu: self.nu_for(mu_sq), cross_section: Arc::clone(&self.cross_section) })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Mode {
    pub index: usize,
    pub mu_sq: f64,
    pub nu: f64,
    cross_section: Arc<CrossSection>,
}

impl Mode {
    pub fn eigenfunction(&self, theta: &[f64]) -> Result<f64> {
        self.cross_section.eigenfunction(self.index, theta)
    }
}
