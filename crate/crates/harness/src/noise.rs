//! Seeded additive noise on Dirichlet traces.

use std::f64::consts::FRAC_1_SQRT_2;

use issp_core::dtn::neumann_from_dirichlet;
use issp_core::forward::BoundaryData;
use issp_core::{Error, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// A generator identity: one ChaCha stream per wavenumber index, so the draw
/// at a given κ does not depend on scheduling or on the other wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseSeed {
    pub master: u64,
    pub stream: u64,
}

impl NoiseSeed {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// `sqrt(Σ w|u|² / Σ w)` over the boundary quadrature.
pub fn weighted_rms(data: &BoundaryData) -> f64 {
    let g = &data.grid;
    let total: f64 = g.weights.iter().sum();
    let s: f64 = g.weights.iter().zip(&data.dirichlet).map(|(w, u)| w * u.norm_sqr()).sum();
    (s / total).sqrt()
}

/// `dirichlet[j] += δ · rms · η_j` with `η_j` standard complex normal
/// (`E|η|² = 1`), then the Neumann trace is rebuilt as `ℬ(dirichlet)`.
/// At `δ = 0` the Dirichlet trace is returned bit for bit.
pub fn add_noise(data: &BoundaryData, delta: f64, seed: NoiseSeed, truncation: Option<usize>) -> Result<BoundaryData> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("noise level must be ≥ 0, got {delta}")));
    }
    let mut noisy = BoundaryData { neumann: None, ..data.clone() };
    if delta > 0.0 {
        let scale = delta * weighted_rms(data);
        let normal = Normal::new(0.0, FRAC_1_SQRT_2).expect("finite standard deviation");
        let mut rng = seed.rng();
        for u in &mut noisy.dirichlet {
            let (re, im) = (normal.sample(&mut rng), normal.sample(&mut rng));
            *u += C64::new(re, im) * scale;
        }
    }
    neumann_from_dirichlet(&noisy, truncation)
}
