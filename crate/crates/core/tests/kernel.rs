use std::f64::consts::PI;

use conekit::cross_section::{build_cross_section, ConeGeometry, CrossSectionSpec, Mode};
use conekit::kernel::*;

fn circle4() -> ConeGeometry {
    ConeGeometry::new(2, build_cross_section(&CrossSectionSpec::Circle { circumference: 4.0 * PI }).unwrap()).unwrap()
}

fn mode_with_nu(g: &ConeGeometry, nu: f64) -> Mode {
    g.modes(40).unwrap().into_iter().find(|m| (m.nu - nu).abs() < 1e-12).unwrap()
}

const NUS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.5];

/// Sine kernel before the first arrival, 5 orders × 4 (t, r, r').
#[test]
fn sine_kernel_vanishes_before_arrival() {
    let g = circle4();
    let spec = QuadratureSpec::filon();
    for nu in NUS {
        let m = mode_with_nu(&g, nu);
        for &(t, r, rp) in &[(0.3, 1.0, 1.9), (0.85, 1.0, 1.9), (0.2, 0.5, 2.0), (1.4, 0.5, 2.0)] {
            let v = sine_mode_kernel(&g, &m, t, r, rp, &spec).unwrap();
            assert!(v.value.norm() <= v.est_err, "nu={nu} t={t}: {} err {}", v.value, v.est_err);
        }
    }
}

#[test]
fn schemes_agree_on_test_matrix() {
    let g = circle4();
    for nu in NUS {
        let m = mode_with_nu(&g, nu);
        for &(t, r, rp) in &[(2.5, 1.0, 1.0), (3.3, 0.8, 1.7), (1.2, 0.8, 1.7)] {
            let a = halfwave_mode_kernel(&g, &m, t, r, rp, &QuadratureSpec::default()).unwrap();
            let b = halfwave_mode_kernel(&g, &m, t, r, rp, &QuadratureSpec::filon()).unwrap();
            assert!((a.value - b.value).norm() <= 2.0 * (a.est_err + b.est_err), "nu={nu} t={t}");
        }
    }
}

#[test]
fn damping_ladder_settles_within_error() {
    let g = circle4();
    let m = mode_with_nu(&g, 1.0);
    let v = halfwave_mode_kernel(&g, &m, 3.3, 0.8, 1.7, &QuadratureSpec::default()).unwrap();
    let seq = &v.eps_sequence;
    assert_eq!(seq.len(), 4);
    assert!(seq.windows(2).all(|w| w[1].0 < w[0].0));
    let steps: Vec<f64> = seq.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    assert!(steps.windows(2).all(|w| w[1] < w[0]), "{steps:?}");
    assert!(v.est_err < steps[2], "{} vs {steps:?}", v.est_err);
}

#[test]
fn low_frequency_cutoff_moves_values_boundedly() {
    // frozen from a single calibration sweep over these orders
    const C: f64 = 0.5;
    let g = circle4();
    let spec = QuadratureSpec::filon();
    for nu in NUS {
        let m = mode_with_nu(&g, nu);
        let at = |c: f64| halfwave_mode_kernel(&g, &m, 3.3, 0.8, 1.7, &QuadratureSpec { cutoff_low: c, ..spec }).unwrap().value;
        let base = at(1.0);
        for c in [0.5, 0.75, 1.5, 2.0] {
            assert!((at(c) - base).norm() <= C * (c - 1.0f64).abs(), "nu={nu} c={c}");
        }
    }
}

#[test]
fn diffractive_front_value_grows_linearly_in_truncation() {
    let g = circle4();
    for nu in [0.5, 1.5] {
        let m = mode_with_nu(&g, nu);
        let at = |lam: f64| {
            let s = QuadratureSpec { cutoff_high: lam, damping_eps: 0.0, panels: 4000, ..QuadratureSpec::default() };
            halfwave_mode_kernel(&g, &m, 2.5, 1.0, 1.5, &s).unwrap().value.norm()
        };
        let (a, b, c) = (at(400.0), at(800.0), at(1600.0));
        assert!((b / a - 2.0).abs() < 0.05 && (c / b - 2.0).abs() < 0.05, "nu={nu}: {a} {b} {c}");
    }
}

#[test]
fn value_blows_up_approaching_the_front() {
    let g = circle4();
    let spec = QuadratureSpec::filon();
    for nu in NUS {
        let m = mode_with_nu(&g, nu);
        let mag: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|d| halfwave_mode_kernel(&g, &m, 2.5 + d, 1.0, 1.5, &spec).unwrap().value.norm())
            .collect();
        assert!(mag[1] > 5.0 * mag[0] && mag[2] > 5.0 * mag[1], "nu={nu}: {mag:?}");
    }
}
