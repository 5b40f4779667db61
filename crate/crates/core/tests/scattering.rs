use std::f64::consts::PI;

use conekit::cross_section::{build_cross_section, ConeGeometry, CrossSectionSpec, Mode};
use conekit::scattering::*;
use conekit::Error;
use num_complex::Complex64;

fn circle(rho: f64) -> ConeGeometry {
    ConeGeometry::new(2, build_cross_section(&CrossSectionSpec::Circle { circumference: rho }).unwrap()).unwrap()
}

fn sphere() -> ConeGeometry {
    ConeGeometry::new(3, build_cross_section(&CrossSectionSpec::Sphere2).unwrap()).unwrap()
}

fn distinct_modes(g: &ConeGeometry, k: usize) -> Vec<Mode> {
    let mut out: Vec<Mode> = Vec::new();
    for m in g.modes(4 * k + 4).unwrap() {
        if out.last().map_or(true, |p| (p.nu - m.nu).abs() > 1e-12) {
            out.push(m);
        }
    }
    out.truncate(k);
    out
}

#[test]
fn ode_ratio_matches_closed_form() {
    let g = circle(4.0 * PI);
    for &lambda in &[1.0, 3.0] {
        for (k, m) in distinct_modes(&g, 10).iter().enumerate() {
            assert!((m.nu - k as f64 / 2.0).abs() < 1e-12);
            let r_max = 400.0 * (m.nu + 1.0) / lambda;
            let c = scattering_eigenvalue_ode(&g, m, lambda, r_max).unwrap();
            let want = scattering_eigenvalue(m, LambdaSign::Plus);
            assert!((c.ratio() - want).norm() < 1e-6, "lambda={lambda} k={k}: {} vs {want}", c.ratio());
        }
    }
}

#[test]
fn ode_solution_satisfies_equation() {
    let g = circle(4.0 * PI);
    let m = &distinct_modes(&g, 4)[3];
    let ode = radial_solution(&g, m, 2.0, 200.0, Source::OdeIntegrated).unwrap();
    let exact = radial_solution(&g, m, 2.0, 200.0, Source::BesselClosedForm).unwrap();
    assert!(collocation_residual(&ode, &g) < 1e-6);
    assert!(collocation_residual(&exact, &g) < 1e-6);
    let peak = exact.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let diff = ode.values.iter().zip(&exact.values).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    assert!(diff < 1e-7 * peak, "diff {diff}");
}

#[test]
fn three_dimensional_cone() {
    let g = sphere();
    for m in distinct_modes(&g, 4) {
        let c = scattering_eigenvalue_ode(&g, &m, 1.5, 400.0 * (m.nu + 1.0) / 1.5).unwrap();
        assert!((c.ratio() - scattering_eigenvalue(&m, LambdaSign::Plus)).norm() < 1e-6);
    }
}

#[test]
fn second_kind_admixture_is_detected() {
    let g = circle(4.0 * PI);
    let m = &distinct_modes(&g, 3)[2];
    let want = scattering_eigenvalue(m, LambdaSign::Plus);
    let mut last = 0.0;
    for &delta in &[1e-3, 1e-2, 1e-1] {
        let opts = RadialOptions { y_admixture: delta, ..RadialOptions::default() };
        let sol = radial_solution_with(&g, m, 1.0, 400.0 * (m.nu + 1.0), Source::OdeIntegrated, &opts).unwrap();
        let c = extract_in_out(&sol, &g).unwrap();
        let shift = (c.ratio() - want).norm();
        // real admixture rotates the ratio: the phase moves by -2 atan(delta)
        let expected = (c.ratio() / want).arg();
        assert!((expected + 2.0 * delta.atan()).abs() < 1e-6, "delta={delta}: {expected}");
        assert!(shift > 1.5 * delta && shift > last);
        last = shift;
    }
}

#[test]
fn unitarity_and_conjugation() {
    for m in sphere().modes(30).unwrap() {
        let p = scattering_eigenvalue(&m, LambdaSign::Plus);
        assert!((p.norm() - 1.0).abs() < 1e-12);
        assert!((p - scattering_eigenvalue(&m, LambdaSign::Minus).conj()).norm() < 1e-15);
    }
    let s = scattering_matrix(&circle(3.0), -2.0, 7).unwrap();
    assert_eq!(s.diag.len(), 7);
    assert!(matches!(scattering_matrix(&circle(3.0), 0.0, 7), Err(Error::NonPositiveParameter(_))));
}

#[test]
fn fit_rejects_short_window() {
    let g = circle(4.0 * PI);
    let m = &g.modes(1).unwrap()[0];
    let sol = radial_solution(&g, m, 1.0, 100.0, Source::BesselClosedForm).unwrap();
    assert!(matches!(extract_in_out_window(&sol, &g, 90.0, 100.0, 2), Err(Error::IllConditionedFit(_))));
}

#[test]
fn sphere_kernel_vanishes() {
    let g = sphere();
    for &d in &[PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let a = [0.4, 1.1];
        // a point at geodesic distance d along the meridian
        let b = [0.4 + d, 1.1];
        let k = scattering_kernel(&g, LambdaSign::Plus, &a, &b, 0.2, 10_000_000).unwrap();
        assert!(k.value.norm() < 1e-3, "d={d}: {} +- {}", k.value, k.est_err);
    }
}

#[test]
fn kernel_symmetry_and_cone_angle_limit() {
    let g = circle(4.0 * PI);
    let (a, b) = ([0.3], [2.0 * PI + 0.3]);
    let k1 = scattering_kernel(&g, LambdaSign::Plus, &a, &b, 0.2, 8001).unwrap();
    let k2 = scattering_kernel(&g, LambdaSign::Plus, &b, &a, 0.2, 8001).unwrap();
    assert!((k1.value - k2.value).norm() < 1e-12);
    assert!(k1.value.norm() > 1e-2);
    let k3 = scattering_kernel(&g, LambdaSign::Plus, &a, &b, 0.2, 16001).unwrap();
    assert!((k1.value - k3.value).norm() < 1e-3 * k1.value.norm());
    assert!(k1.sequence.iter().all(|s: &(f64, Complex64)| s.1.is_finite()));
}
