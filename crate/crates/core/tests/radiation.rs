use std::f64::consts::PI;

use conekit::cross_section::{build_cross_section, ConeGeometry, CrossSectionSpec, Mode};
use conekit::radiation::*;
use conekit::scattering::*;
use conekit::Error;

fn circle(rho: f64) -> ConeGeometry {
    ConeGeometry::new(2, build_cross_section(&CrossSectionSpec::Circle { circumference: rho }).unwrap()).unwrap()
}

fn mode_with_nu(g: &ConeGeometry, nu: f64) -> Mode {
    g.modes(40).unwrap().into_iter().find(|m| (m.nu - nu).abs() < 1e-12).unwrap()
}

fn small(half_width: f64, ladder: &[f64]) -> RadiationOptions {
    RadiationOptions { r_ladder: ladder.to_vec(), lag: LagGrid { h: 0.05, half_width }, rp_offset: 0.0 }
}

fn s_grid(rp: f64) -> Vec<f64> {
    (0..40).map(|k| -3.0 * rp + 0.1537 * rp * k as f64).filter(|s| (s.abs() - rp).abs() > 1e-3).collect()
}

#[test]
fn half_order_radiation_field_is_a_box() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 0.5);
    let rp = 2.0;
    let s = s_grid(rp);
    let tr = radiation_field_mode(&g, &m, rp, &s, &DEFAULT_LADDER).unwrap();
    for (s, w) in s.iter().zip(&tr.values) {
        let want = if s.abs() < rp { 0.5 * rp.powf(g.alpha - 0.5) } else { 0.0 };
        assert!((w - want).abs() <= 1e-5, "s={s} w={w} want={want}");
    }
}

#[test]
fn radiation_field_vanishes_before_the_causal_lag() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.5);
    let rp = 1.5;
    let s: Vec<f64> = (0..12).map(|k| -4.0 + 0.2 * k as f64).collect();
    let tr = radiation_field_mode(&g, &m, rp, &s, &DEFAULT_LADDER).unwrap();
    for (s, w) in s.iter().zip(&tr.values) {
        assert!(w.abs() <= 1e-6, "s={s} w={w}");
    }
}

#[test]
fn ladder_differences_halve_per_level() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.5);
    let rp = 1.0;
    let s = [-0.7, -0.3, 0.2, 0.5, 1.4, 2.5];
    let tr = radiation_field_mode(&g, &m, rp, &s, &DEFAULT_LADDER).unwrap();
    let d = |a: usize, b: usize| (0..s.len()).map(|i| (tr.raw[b][i] - tr.raw[a][i]).abs()).fold(0.0, f64::max);
    let ratio = d(1, 2) / d(0, 1);
    assert!((0.35..0.65).contains(&ratio), "ratio {ratio}");
    assert!(tr.extrapolation_residuals[1] < tr.extrapolation_residuals[0]);
}

#[test]
fn radiation_field_preconditions() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.0);
    assert!(matches!(radiation_field_mode(&g, &m, 5.0, &[0.0, 20.0], &DEFAULT_LADDER), Err(Error::RegimeViolation(_))));
    assert!(matches!(radiation_field_mode(&g, &m, 1.0, &[0.0], &[200.0, 300.0, 800.0]), Err(Error::BadSpec(_))));
}

#[test]
fn half_order_kernel_is_a_point_mass() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 0.5);
    let k = scattering_operator_kernel_with(&g, &m, &small(2.0, &[40.0, 80.0, 160.0])).unwrap();
    let h = k.lag.h;
    for (u, v) in k.lags().iter().zip(&k.values) {
        // the fourth-order stencil spreads -δ over three samples
        let want = if u.abs() < 1e-12 {
            -26.0 / (24.0 * h)
        } else if (u.abs() - h).abs() < 1e-12 {
            1.0 / (24.0 * h)
        } else {
            0.0
        };
        assert!((v - want).abs() <= 1e-4 / h, "u={u} v={v} want={want}");
    }
}

#[test]
fn kernel_depends_on_the_lag_only() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.0);
    let a = scattering_operator_kernel_with(&g, &m, &small(2.0, &[40.0, 80.0, 160.0])).unwrap();
    let mut shifted = small(2.0, &[40.0, 80.0, 160.0]);
    shifted.rp_offset = 3.0;
    let b = scattering_operator_kernel_with(&g, &m, &shifted).unwrap();
    let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-4 * scale, "{x} vs {y}");
    }
}

#[test]
fn kernel_integral_is_stable_under_window_doubling() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.5);
    let total = |hw: f64| {
        let k = scattering_operator_kernel_with(&g, &m, &small(hw, &[100.0, 200.0, 400.0])).unwrap();
        k.values.iter().sum::<f64>() * k.lag.h
    };
    let (a, b) = (total(6.0), total(12.0));
    assert!(a.is_finite() && (a - b).abs() <= 1e-4, "{a} vs {b}");
}

#[test]
fn negating_lambda_conjugates() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.0);
    let k = scattering_operator_kernel_with(&g, &m, &small(16.0, &[80.0, 160.0, 320.0])).unwrap();
    for &l in &[2.0, 4.0] {
        let p = scattering_matrix_from_kernel(&k, l).unwrap();
        let q = scattering_matrix_from_kernel(&k, -l).unwrap();
        assert!((p - q.conj()).norm() <= 1e-12, "{p} {q}");
        // integer order: S = -i e^{-iπ} = i
        assert!((p - scattering_eigenvalue(&m, LambdaSign::Plus)).norm() <= 1e-3, "{p}");
        assert!((q - scattering_eigenvalue(&m, LambdaSign::Minus)).norm() <= 1e-3, "{q}");
    }
}

#[test]
fn half_order_pipeline_gives_minus_one() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 0.5);
    let s = scattering_matrix_from_radiation_with(&g, &m, 2.0, &small(16.0, &[80.0, 160.0, 320.0])).unwrap();
    assert!((s + 1.0).norm() <= 5e-3, "{s}");
}

#[test]
fn band_limits_are_enforced() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 0.5);
    let opts = small(16.0, &[80.0, 160.0, 320.0]);
    for l in [0.0, 0.5, 20.0] {
        assert!(matches!(scattering_matrix_from_radiation_with(&g, &m, l, &opts), Err(Error::BandViolation(_))), "l={l}");
    }
}

#[test]
fn doubling_the_ladder_barely_moves_s() {
    let g = circle(4.0 * PI);
    let m = mode_with_nu(&g, 1.5);
    let a = small(16.0, &[80.0, 160.0, 320.0]);
    let b = small(16.0, &[160.0, 320.0, 640.0]);
    let ka = scattering_operator_kernel_with(&g, &m, &a).unwrap();
    let kb = scattering_operator_kernel_with(&g, &m, &b).unwrap();
    for &l in &[2.0, 4.0] {
        let (x, y) = (scattering_matrix_from_kernel(&ka, l).unwrap(), scattering_matrix_from_kernel(&kb, l).unwrap());
        assert!((x - y).norm() <= 2e-3, "l={l} {x} {y}");
    }
}

#[test]
fn radiation_route_matches_closed_form() {
    let g = circle(4.0 * PI);
    for &nu in &[0.5, 1.5] {
        let m = mode_with_nu(&g, nu);
        let k = scattering_operator_kernel_mode(&g, &m, &LagGrid::default()).unwrap();
        for &l in &[1.0, 2.0, 4.0] {
            let s = scattering_matrix_from_kernel(&k, l).unwrap();
            let e = scattering_eigenvalue(&m, LambdaSign::of(l).unwrap());
            assert!((s - e).norm() <= 1e-3, "nu={nu} l={l} {s} vs {e}");
        }
    }
}
