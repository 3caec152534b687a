use std::f64::consts::PI;

use issp_core::geometry::{
    make_anchored_freq_grid, make_ball_grid, make_circle_grid, make_freq_grid, make_sphere_grid, BoundaryLayout,
};
use issp_core::specfun::sph_harmonic;
use issp_core::{Dim, C64};
use proptest::prelude::*;

#[test]
fn disc_area_reaches_tolerance_by_resolution_200() {
    let mut converged = None;
    for res in (16..=400).step_by(8) {
        let g = make_ball_grid(Dim::Two, 1.0, res).unwrap();
        let area: f64 = g.weights.iter().sum();
        if ((area - PI) / PI).abs() <= 1e-3 {
            converged = Some(res);
            break;
        }
    }
    let res = converged.expect("disc area never within 1e-3");
    assert!(res <= 200, "first resolution within 1e-3 is {res}");
    let g = make_ball_grid(Dim::Two, 1.0, 200).unwrap();
    let area: f64 = g.weights.iter().sum();
    assert!(((area - PI) / PI).abs() <= 1e-3, "area {area}");
}

#[test]
fn centred_gaussian_mass() {
    let s = 0.1_f64;
    for (dim, res) in [(Dim::Two, 40), (Dim::Three, 40)] {
        let g = make_ball_grid(dim, 1.0, res).unwrap();
        let mass = g.integrate(|y| (-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / (2.0 * s * s)).exp());
        let exact = (2.0 * PI * s * s).powf(dim.as_usize() as f64 / 2.0);
        assert!(((mass - exact) / exact).abs() < 1e-8, "{dim}: {mass} vs {exact}");
    }
}

#[test]
fn small_ball_volume() {
    let g = make_ball_grid(Dim::Three, 0.5, 128).unwrap();
    let vol: f64 = g.weights.iter().sum();
    let exact = 4.0 / 3.0 * PI * 0.125;
    assert!(((vol - exact) / exact).abs() < 1e-3, "{vol} vs {exact}");
}

#[test]
fn midpoint_rule_order_on_compact_smooth_data() {
    // (1 - |y|²)³ vanishes to second order at the rim; ∫_{B_1} = π/4
    let exact = PI / 4.0;
    let err = |res| {
        let g = make_ball_grid(Dim::Two, 1.0, res).unwrap();
        let v = g.integrate(|y| (1.0 - y[0] * y[0] - y[1] * y[1]).powi(3));
        (v - exact).abs()
    };
    let (e1, e2, e3) = (err(32), err(64), err(128));
    let p1 = (e1 / e2).log2();
    let p2 = (e2 / e3).log2();
    assert!(p1 >= 1.9 && p2 >= 1.9, "orders {p1}, {p2}");
}

#[test]
fn sphere_rule_is_orthonormal_on_low_harmonics() {
    let g = make_sphere_grid(1.0, 12, 24).unwrap();
    let BoundaryLayout::Sphere { .. } = g.layout else { panic!() };
    let angles: Vec<(f64, f64)> = g.normals.iter().map(|n| (n[2].acos(), n[1].atan2(n[0]))).collect();
    let y = |n: usize, m: i64| -> Vec<C64> { angles.iter().map(|&(t, p)| sph_harmonic(n, m, t, p).unwrap()).collect() };
    let inner =
        |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).zip(&g.weights).map(|((a, b), w)| a * b.conj() * w).sum() };
    let y21 = y(2, 1);
    assert!((inner(&y21, &y21) - 1.0).norm() < 1e-10);
    for (n, m) in [(0, 0), (1, 1), (2, 0), (2, -1), (3, 1), (5, 1)] {
        assert!(inner(&y21, &y(n, m)).norm() < 1e-10, "Y_{n}^{m}");
    }
}

#[test]
fn circle_trapezoid_converges_spectrally_on_periodic_data() {
    // ∫ e^{cos θ} dθ = 2π I_0(1)
    let i0_1 = 1.266_065_877_752_008_4;
    for n in [16, 32] {
        let g = make_circle_grid(1.0, n).unwrap();
        let v: f64 = g.nodes.iter().zip(&g.weights).map(|(p, w)| w * p[0].exp()).sum();
        assert!((v - 2.0 * PI * i0_1).abs() < 1e-13, "n={n}");
    }
}

#[test]
fn freq_grid_examples() {
    let (km, k) = (0.5, 10.0);
    let g = make_freq_grid(Some(km), k, 33).unwrap();
    let lin: Vec<f64> = g.kappas.clone();
    assert!((g.integrate(&lin) - (k * k - km * km) / 2.0).abs() < 1e-10);
    let sq: Vec<f64> = g.kappas.iter().map(|k| k * k).collect();
    assert!((g.integrate(&sq) - (k.powi(3) - km.powi(3)) / 3.0).abs() < 1e-8);
}

proptest! {
    #[test]
    fn anchored_grid_reproduces_radial_moments(k in 1.0f64..80.0, n in 16usize..300, d in 2i32..=3) {
        let g = make_anchored_freq_grid(k, n).unwrap();
        prop_assert!(g.kappas.windows(2).all(|w| w[0] < w[1]) && g.kappas[0] > 0.0);
        let v: Vec<f64> = g.kappas.iter().map(|x| x.powi(d - 1)).collect();
        let exact = k.powi(d) / d as f64;
        prop_assert!(((g.integrate(&v) - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn boundary_invariants(r in 0.1f64..10.0, nt in 8usize..80, np in 4usize..40) {
        let c = make_circle_grid(r, nt).unwrap();
        let s = make_sphere_grid(r, nt, np).unwrap();
        let total_c: f64 = c.weights.iter().sum();
        let total_s: f64 = s.weights.iter().sum();
        prop_assert!(((total_c - 2.0 * PI * r) / (2.0 * PI * r)).abs() < 1e-12);
        prop_assert!(((total_s - 4.0 * PI * r * r) / (4.0 * PI * r * r)).abs() < 1e-12);
        for g in [&c, &s] {
            for (p, n) in g.nodes.iter().zip(&g.normals) {
                let m = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                prop_assert!((m - r).abs() <= 1e-13 * r.max(1.0));
                prop_assert!((0..3).all(|i| (n[i] - p[i] / r).abs() < 1e-14));
            }
        }
    }
}
