use std::sync::Arc;

use issp_core::dtn::{
    analyze, apply_dtn, default_truncation, dtn_symbol, neumann_from_dirichlet, synthesize, SpectralTrace,
};
use issp_core::forward::ForwardSolver;
use issp_core::geometry::{make_ball_grid, make_circle_grid, make_sphere_grid, BoundaryGrid};
use issp_core::sources::preset;
use issp_core::specfun::OrderCap;
use issp_core::{Dim, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_trace(dim: Dim, radius: f64, n: usize, seed: u64) -> SpectralTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = SpectralTrace::zeros(dim, radius, n);
    for c in &mut t.coeffs {
        *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    t
}

fn grid_norm_sqr(g: &BoundaryGrid, v: &[C64]) -> f64 {
    g.weights.iter().zip(v).map(|(w, x)| w * x.norm_sqr()).sum()
}

fn sup(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_limited_round_trip_and_parseval(seed in any::<u64>(), three in any::<bool>(), radius in 0.5f64..3.0) {
        let (dim, g, n) = if three {
            (Dim::Three, make_sphere_grid(radius, 14, 28).unwrap(), 13)
        } else {
            (Dim::Two, make_circle_grid(radius, 64).unwrap(), 31)
        };
        let t = random_trace(dim, radius, n, seed);
        let v = synthesize(&g, &t).unwrap();
        let back = analyze(&g, &v, n).unwrap();
        let err = t.coeffs.iter().zip(&back.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "round trip error {err:e}");
        let (spec, grid) = (t.norm_sqr(), grid_norm_sqr(&g, &v));
        prop_assert!((spec - grid).abs() < 1e-10 * grid, "{spec} vs {grid}");
    }
}

#[test]
fn dtn_is_diagonal_per_mode() {
    let kappa = 4.0;
    for (dim, g, n) in
        [(Dim::Two, make_circle_grid(1.3, 48).unwrap(), 20), (Dim::Three, make_sphere_grid(1.3, 12, 24).unwrap(), 11)]
    {
        let symbol = dtn_symbol(dim, kappa, 1.3, n, OrderCap::default()).unwrap();
        let mut t = SpectralTrace::zeros(dim, 1.3, n);
        for (deg, ord) in [(0i64, 0i64), (3, 1), (7, -5), (11, 11)] {
            t.coeffs.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            let i = t.index(deg, ord).unwrap();
            t.coeffs[i] = C64::new(1.0, 0.0);
            let v = synthesize(&g, &t).unwrap();
            let bv = apply_dtn(&g, &v, kappa, Some(n)).unwrap();
            let want = symbol[deg.unsigned_abs() as usize];
            for (a, b) in v.iter().zip(&bv) {
                assert!((a * want - b).norm() < 1e-12 * want.norm() * sup(&v), "{dim} ({deg},{ord})");
            }
        }
    }
}

/// `∂_ν u` of a radiating field equals `ℬu` on `∂B_R`.
fn transparent_residual(dim: Dim, name: &str, kappa: f64, boundary: BoundaryGrid, res: usize, n: Option<usize>) -> f64 {
    let f = preset(name, dim).unwrap();
    let ball = make_ball_grid(dim, f.support_radius, res).unwrap();
    let data = ForwardSolver::new(&f, Arc::new(boundary), &ball).unwrap().solve(kappa).unwrap();
    let bu = apply_dtn(&data.grid, &data.dirichlet, kappa, n).unwrap();
    let nu = data.neumann().unwrap();
    let diff: Vec<C64> = bu.iter().zip(nu).map(|(a, b)| a - b).collect();
    sup(&diff) / sup(nu)
}

#[test]
fn forward_traces_satisfy_the_transparent_condition() {
    for name in ["gaussian_pair", "bump", "bessel"] {
        for kappa in [1.0, 7.5, 20.0] {
            let r = transparent_residual(Dim::Two, name, kappa, make_circle_grid(1.0, 128).unwrap(), 64, None);
            assert!(r <= 1e-6, "{name} κ={kappa}: {r:e}");
        }
    }
    for kappa in [2.0, 10.0] {
        let r =
            transparent_residual(Dim::Three, "gaussian_pair", kappa, make_sphere_grid(1.0, 43, 86).unwrap(), 32, None);
        assert!(r <= 1e-6, "3D κ={kappa}: {r:e}");
    }
}

#[test]
fn transparent_residual_shrinks_with_boundary_resolution() {
    let mut last = f64::INFINITY;
    for (nodes, n) in [(24, 10), (48, 22), (96, 46)] {
        let r = transparent_residual(Dim::Two, "bump", 8.0, make_circle_grid(1.0, nodes).unwrap(), 48, Some(n));
        assert!(r < last.max(1e-12), "{nodes} nodes: {r:e} after {last:e}");
        last = r;
    }
    assert!(last < 1e-8);
}

#[test]
fn synthesized_neumann_matches_forward_neumann() {
    let f = preset("gaussian_pair", Dim::Two).unwrap();
    let ball = make_ball_grid(Dim::Two, f.support_radius, 64).unwrap();
    let solver = ForwardSolver::new(&f, Arc::new(make_circle_grid(1.0, 128).unwrap()), &ball).unwrap();
    let data = solver.solve(12.0).unwrap();
    let stripped =
        issp_core::forward::BoundaryData::new(data.kappa, data.grid.clone(), data.dirichlet.clone(), None).unwrap();
    let filled = neumann_from_dirichlet(&stripped, None).unwrap();
    assert_eq!(filled.kappa, data.kappa);
    assert!(Arc::ptr_eq(&filled.grid, &data.grid));
    let (a, b) = (filled.neumann().unwrap(), data.neumann().unwrap());
    let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    assert!(sup(&diff) <= 1e-6 * sup(b));

    // linear in the Dirichlet input
    let s = C64::new(-0.7, 2.0);
    let scaled = issp_core::forward::BoundaryData::new(
        data.kappa,
        data.grid.clone(),
        data.dirichlet.iter().map(|v| v * s).collect(),
        None,
    )
    .unwrap();
    let fs = neumann_from_dirichlet(&scaled, None).unwrap();
    for (x, y) in fs.neumann().unwrap().iter().zip(a) {
        assert!((x - y * s).norm() < 1e-12 * sup(a) * s.norm());
    }
}

#[test]
fn extra_modes_beyond_default_truncation_do_not_matter() {
    let f = preset("bump", Dim::Two).unwrap();
    let ball = make_ball_grid(Dim::Two, f.support_radius, 48).unwrap();
    let g = make_circle_grid(1.0, 256).unwrap();
    let data = ForwardSolver::new(&f, Arc::new(g), &ball).unwrap().solve(15.0).unwrap();
    let n = default_truncation(15.0, 1.0);
    let a = apply_dtn(&data.grid, &data.dirichlet, 15.0, Some(n)).unwrap();
    let b = apply_dtn(&data.grid, &data.dirichlet, 15.0, Some(n + 40)).unwrap();
    let diff: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    assert!(sup(&diff) < 1e-10 * sup(&a), "{:e}", sup(&diff) / sup(&a));
}

#[test]
fn outgoing_energy_flux_is_nonnegative() {
    // Im ∫ conj(u) ℬu ≥ 0 for every trace
    let g = make_circle_grid(1.0, 64).unwrap();
    for seed in 0..8 {
        let t = random_trace(Dim::Two, 1.0, 20, seed);
        let v = synthesize(&g, &t).unwrap();
        let bv = apply_dtn(&g, &v, 6.0, Some(20)).unwrap();
        let flux: C64 = g.weights.iter().zip(v.iter().zip(&bv)).map(|(w, (a, b))| a.conj() * b * *w).sum();
        assert!(flux.im > 0.0);
    }
}
