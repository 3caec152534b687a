//! Fourier data from boundary traces and low-pass reconstruction.
//!
//! For a radiating `u` with `Δu + κ²u = f` and `|ξ| = κ`, Green's second
//! identity against `e^{-iξ·x}` gives
//! `f̂(ξ) = ∫_{∂B_R} e^{-iξ·x} (∂_ν u + i(ξ·ν) u) dγ`.
//! Sweeping `κ` over `(0, K]` fills the ball `|ξ| ≤ K`, and
//! `f_K(y) = (2π)^{-d} ∫_{|ξ|≤K} f̂(ξ) e^{iξ·y} dξ` is the reconstruction.

mod io;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::forward::BoundaryData;
use crate::geometry::{gauss_legendre, BallGrid, FreqGrid};
use crate::sources::{Quality, SourceField};
use crate::specfun::bessel_j;
use crate::{dot, norm, sub, Dim, Error, Point, Result, C64};

/// Unit directions with angular weights summing to `|S^{d-1}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub dim: Dim,
    pub directions: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DirectionSet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// `n` uniform angles on the circle.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("need at least 3 directions, got {n}")));
        }
        let directions = (0..n)
            .map(|l| {
                let (s, c) = (2.0 * PI * l as f64 / n as f64).sin_cos();
                [c, s, 0.0]
            })
            .collect();
        Ok(DirectionSet { dim: Dim::Two, directions, weights: vec![2.0 * PI / n as f64; n] })
    }

    /// Gauss–Legendre in `cos θ` times `n_phi` uniform azimuths.
    pub fn sphere(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::Config(format!("sphere direction set {n_theta}×{n_phi} too small")));
        }
        let (t, w) = gauss_legendre(n_theta);
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (ti, wi) in t.iter().zip(&w) {
            let st = (1.0 - ti * ti).sqrt();
            for k in 0..n_phi {
                let (sp, cp) = (2.0 * PI * k as f64 / n_phi as f64).sin_cos();
                directions.push([st * cp, st * sp, *ti]);
                weights.push(wi * 2.0 * PI / n_phi as f64);
            }
        }
        Ok(DirectionSet { dim: Dim::Three, directions, weights })
    }

    /// Default set for band limit `K` and support radius `r`: `2⌈Kr⌉ + 16`
    /// angles in 2D; `(⌈Kr⌉ + 8) × (2⌈Kr⌉ + 16)` nodes in 3D.
    pub fn for_band(dim: Dim, k_max: f64, support_radius: f64) -> Result<Self> {
        let kr = (k_max * support_radius).ceil() as usize;
        match dim {
            Dim::Two => Self::circle(2 * kr + 16),
            Dim::Three => Self::sphere(kr + 8, 2 * kr + 16),
        }
    }
}

/// `f̂(κω_l)` for each direction, from both traces at one wavenumber.
pub fn fourier_data_from_boundary(data: &BoundaryData, directions: &[Point]) -> Result<Vec<C64>> {
    let neumann = data.neumann.as_deref().ok_or_else(|| {
        Error::State(format!("no Neumann trace at κ = {}; synthesise one with dtn::neumann_from_dirichlet", data.kappa))
    })?;
    let g = &data.grid;
    let kappa = data.kappa;
    Ok(directions
        .iter()
        .map(|w| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..g.len() {
                let x = &g.nodes[j];
                let xi_nu = kappa * dot(w, &g.normals[j]);
                let e = C64::from_polar(g.weights[j], -kappa * dot(w, x));
                acc += e * (neumann[j] + C64::new(0.0, xi_nu) * data.dirichlet[j]);
            }
            acc
        })
        .collect())
}

/// `f̂` on a polar lattice `ξ = κ_j ω_l`, stored frequency-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSamples {
    pub dim: Dim,
    pub k_max: f64,
    pub kappas: Vec<f64>,
    pub directions: Vec<Point>,
    /// `freq_weight_j · κ_j^{d-1} · angular_weight_l`, index `j·n_dir + l`.
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
}

impl FourierSamples {
    pub fn n_freq(&self) -> usize {
        self.kappas.len()
    }

    pub fn n_dir(&self) -> usize {
        self.directions.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn xi(&self, index: usize) -> Point {
        let (j, l) = (index / self.n_dir(), index % self.n_dir());
        let (k, w) = (self.kappas[j], &self.directions[l]);
        [k * w[0], k * w[1], k * w[2]]
    }

    /// Samples with `κ ≤ k` only; `k` must not exceed `k_max`.
    pub fn truncated(&self, k: f64) -> Result<FourierSamples> {
        if k > self.k_max * (1.0 + 1e-12) {
            return Err(Error::Range(format!("cannot truncate samples at {k} > K = {}", self.k_max)));
        }
        let keep = self.kappas.iter().take_while(|&&x| x <= k * (1.0 + 1e-12)).count();
        let n = keep * self.n_dir();
        Ok(FourierSamples {
            dim: self.dim,
            k_max: k,
            kappas: self.kappas[..keep].to_vec(),
            directions: self.directions.clone(),
            weights: self.weights[..n].to_vec(),
            values: self.values[..n].to_vec(),
        })
    }

    /// `(2π)^{-d} Σ w |f̂|²`, the Plancherel energy of the low-pass field.
    pub fn energy(&self) -> f64 {
        let s: f64 = self.weights.iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum();
        s / (2.0 * PI).powi(self.dim.as_usize() as i32)
    }
}

/// Combines per-frequency direction samples with the polar weights.
pub fn assemble_fourier_samples(per_freq: &[Vec<C64>], freq: &FreqGrid, dirs: &DirectionSet) -> Result<FourierSamples> {
    if per_freq.is_empty() || freq.is_empty() {
        return Err(Error::Shape("no frequencies to assemble".into()));
    }
    if per_freq.len() != freq.len() {
        return Err(Error::Shape(format!("{} frequency blocks for {} grid nodes", per_freq.len(), freq.len())));
    }
    if let Some(bad) = per_freq.iter().position(|b| b.len() != dirs.len()) {
        return Err(Error::Shape(format!(
            "frequency block {bad} has {} values, expected {} directions",
            per_freq[bad].len(),
            dirs.len()
        )));
    }
    let p = dirs.dim.as_usize() as i32 - 1;
    let mut weights = Vec::with_capacity(freq.len() * dirs.len());
    for (k, fw) in freq.kappas.iter().zip(&freq.weights) {
        weights.extend(dirs.weights.iter().map(|aw| fw * k.powi(p) * aw));
    }
    Ok(FourierSamples {
        dim: dirs.dim,
        k_max: freq.k_max,
        kappas: freq.kappas.clone(),
        directions: dirs.directions.clone(),
        weights,
        values: per_freq.concat(),
    })
}

/// Extra bookkeeping carried by a reconstruction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReconstructionMeta {
    pub n_freq: usize,
    pub n_dir: usize,
    pub noise_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub grid: BallGrid,
    pub values: Vec<C64>,
    pub k_used: f64,
    pub meta: ReconstructionMeta,
}

impl Reconstruction {
    /// Copy with imaginary parts dropped, for sources known to be real.
    pub fn real_part(&self) -> Reconstruction {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| v.im = 0.0);
        out
    }
}

/// Re-seeds the phase recurrence with a direct exponential this often.
const PHASE_RESYNC: usize = 64;

/// `f_K(y_k) = (2π)^{-d} Σ_ξ w_ξ f̂(ξ) e^{iξ·y_k}` on every target node.
pub fn reconstruct(samples: &FourierSamples, target: &BallGrid) -> Result<Reconstruction> {
    if samples.is_empty() {
        return Err(Error::Shape("no Fourier samples".into()));
    }
    if samples.dim != target.dim {
        return Err(Error::Shape(format!("samples are {}D, target grid is {}D", samples.dim, target.dim)));
    }
    if samples.weights.len() != samples.len() || samples.len() != samples.n_freq() * samples.n_dir() {
        return Err(Error::Shape("sample weights/values do not match the polar lattice".into()));
    }
    let norm_const = (2.0 * PI).powi(-(samples.dim.as_usize() as i32));
    let (nf, nd) = (samples.n_freq(), samples.n_dir());
    // uniform κ spacing lets e^{iκ_j ω·y} advance by one multiplication
    let step = if nf > 1 { samples.kappas[1] - samples.kappas[0] } else { 0.0 };
    let uniform = samples.kappas.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-12 * samples.k_max);
    let wv: Vec<C64> = samples.weights.iter().zip(&samples.values).map(|(w, v)| v * *w).collect();
    let values = target
        .nodes
        .par_iter()
        .map(|y| {
            let mut acc = C64::new(0.0, 0.0);
            for (l, w) in samples.directions.iter().enumerate() {
                let t = dot(w, y);
                let advance = C64::from_polar(1.0, step * t);
                let mut z = C64::new(0.0, 0.0);
                for j in 0..nf {
                    if !uniform || j % PHASE_RESYNC == 0 {
                        z = C64::from_polar(1.0, samples.kappas[j] * t);
                    } else {
                        z *= advance;
                    }
                    acc += wv[j * nd + l] * z;
                }
            }
            acc * norm_const
        })
        .collect();
    Ok(Reconstruction {
        grid: target.clone(),
        values,
        k_used: samples.k_max,
        meta: ReconstructionMeta { n_freq: nf, n_dir: nd, noise_seed: None },
    })
}

/// Samples `source.analytic_fourier` on the same polar lattice as `freq`
/// and `dirs`: the clean reference for the boundary-data route.
pub fn analytic_samples(source: &SourceField, freq: &FreqGrid, dirs: &DirectionSet) -> Result<FourierSamples> {
    let blocks: Vec<Vec<C64>> = freq
        .kappas
        .iter()
        .map(|k| {
            dirs.directions.iter().map(|w| source.analytic_fourier(&[k * w[0], k * w[1], k * w[2]]).value).collect()
        })
        .collect();
    assemble_fourier_samples(&blocks, freq, dirs)
}

/// `(2π)^{-d} ∫_{a ≤ |ξ| ≤ b} |f̂(ξ)|² dξ` by radial quadrature, with the
/// angular integral of the cross terms done in closed form.
pub fn spectral_energy(source: &SourceField, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let dim = source.dim;
    let terms = &source.terms;
    let mut spread: f64 = 0.0;
    for s in terms {
        for t in terms {
            spread = spread.max(norm(&sub(&s.center, &t.center)));
        }
    }
    let reach = terms.iter().map(|t| t.profile.reach()).fold(0.0, f64::max);
    let (x, w) = gauss_legendre(32);
    let panel = 8.0 / (2.0 * reach + spread);
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    let mut radial = vec![0.0; terms.len()];
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let q = lo + 0.5 * h * (xi + 1.0);
            for (r, t) in radial.iter_mut().zip(terms) {
                *r = t.profile.transform(dim, q).0;
            }
            let mut s = 0.0;
            for (i, ti) in terms.iter().enumerate() {
                for (j, tj) in terms.iter().enumerate() {
                    let z = q * norm(&sub(&ti.center, &tj.center));
                    let ang = match dim {
                        Dim::Two => 2.0 * PI * bessel_j(0, z).unwrap_or(0.0),
                        Dim::Three => 4.0 * PI * if z < 1e-4 { 1.0 - z * z / 6.0 } else { z.sin() / z },
                    };
                    s += (ti.amplitude * tj.amplitude.conj()).re * radial[i] * radial[j] * ang;
                }
            }
            acc += 0.5 * h * wi * q.powi(dim.as_usize() as i32 - 1) * s;
        }
    }
    acc / (2.0 * PI).powi(dim.as_usize() as i32)
}

/// Upper radius beyond which `|f̂|²` is negligible: 11 Gaussian widths for
/// Gaussian profiles, far out in the algebraic tail otherwise.
fn spectral_horizon(source: &SourceField, k: f64) -> f64 {
    let mut top: f64 = 0.0;
    for t in &source.terms {
        let reach = t.profile.reach();
        let q = if t.profile.transform(source.dim, 0.0).1 == Quality::Exact {
            // reach = σ√(2 ln 10¹²)
            11.0 * 7.4338 / reach
        } else {
            400.0 / reach
        };
        top = top.max(q);
    }
    k.max(0.0) + top
}

/// `‖f - f_K‖_{L²}`, the irreducible low-pass error.
pub fn lowpass_oracle(source: &SourceField, k_max: f64) -> f64 {
    let k = k_max.max(0.0);
    spectral_energy(source, k, spectral_horizon(source, k)).max(0.0).sqrt()
}

/// `‖f‖_{L²}` from the Fourier side.
pub fn l2_norm_from_spectrum(source: &SourceField) -> f64 {
    lowpass_oracle(source, 0.0)
}

pub use io::{read_fourier_samples, write_fourier_samples};
