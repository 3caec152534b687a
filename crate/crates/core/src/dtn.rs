//! Dirichlet-to-Neumann map on `∂B_R` as a truncated spectral series.
//!
//! Coefficients are taken against the basis that is orthonormal in
//! `L²(∂B_R)`: `e^{inθ}/√(2πR)` on the circle and `Y_n^m/R` on the sphere, so
//! `Σ|c|²` is the trace's `L²(∂B_R)` norm. [`SpectralTrace::mode_amplitude`]
//! converts back to the plain `e^{inθ}` / `Y_n^m` amplitudes.

use std::f64::consts::PI;

use crate::forward::BoundaryData;
use crate::geometry::{BoundaryGrid, BoundaryLayout};
use crate::specfun::{hankel1_dtn_ratios, normalized_legendre_column, sph_hankel1_dtn_ratios, OrderCap};
use crate::{Dim, Error, Result, C64};

/// Default truncation `⌈κR⌉ + 32`.
pub fn default_truncation(kappa: f64, radius: f64) -> usize {
    (kappa * radius).ceil() as usize + 32
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTrace {
    pub dim: Dim,
    pub radius: f64,
    pub truncation: usize,
    /// d = 2: index `n + N`, `|n| ≤ N`. d = 3: index `n² + n + m`, `|m| ≤ n ≤ N`.
    pub coeffs: Vec<C64>,
}

impl SpectralTrace {
    pub fn zeros(dim: Dim, radius: f64, truncation: usize) -> Self {
        SpectralTrace { dim, radius, truncation, coeffs: vec![C64::new(0.0, 0.0); coefficient_count(dim, truncation)] }
    }

    /// Position of mode `(n, m)`; `m` is ignored in 2D.
    pub fn index(&self, n: i64, m: i64) -> Option<usize> {
        let big_n = self.truncation as i64;
        match self.dim {
            Dim::Two => (n.abs() <= big_n).then(|| (n + big_n) as usize),
            Dim::Three => (n >= 0 && n <= big_n && m.abs() <= n).then(|| (n * n + n + m) as usize),
        }
    }

    /// Amplitude of `e^{inθ}` (d = 2) or `Y_n^m` (d = 3) in the trace.
    pub fn mode_amplitude(&self, n: i64, m: i64) -> Option<C64> {
        let c = self.coeffs[self.index(n, m)?];
        Some(match self.dim {
            Dim::Two => c / (2.0 * PI * self.radius).sqrt(),
            Dim::Three => c / self.radius,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn coefficient_count(dim: Dim, truncation: usize) -> usize {
    match dim {
        Dim::Two => 2 * truncation + 1,
        Dim::Three => (truncation + 1) * (truncation + 1),
    }
}

/// Largest truncation a grid resolves exactly.
pub fn max_truncation(grid: &BoundaryGrid) -> usize {
    match &grid.layout {
        BoundaryLayout::Circle { n_theta } => (n_theta / 2).saturating_sub(1),
        BoundaryLayout::Sphere { n_theta, n_phi, .. } => (n_theta - 1).min((n_phi - 1) / 2),
    }
}

fn check(grid: &BoundaryGrid, values: &[C64], truncation: usize) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Shape(format!("{} values for {} boundary nodes", values.len(), grid.len())));
    }
    let max = max_truncation(grid);
    if truncation > max {
        return Err(Error::Cap { what: "spectral truncation N", value: truncation, max });
    }
    Ok(())
}

/// `e^{-2πi k/n}` for `k = 0..n`; products of angles index into it mod `n`.
fn roots_of_unity(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)).collect()
}

/// `Σ_k v_k e^{-imφ_k}` over a uniform ring, for `|m| ≤ top`; index `m + top`.
fn ring_dft(v: &[C64], top: usize, roots: &[C64]) -> Vec<C64> {
    let n = v.len();
    (-(top as i64)..=top as i64)
        .map(|m| {
            let step = m.rem_euclid(n as i64) as usize;
            v.iter().enumerate().map(|(k, x)| x * roots[(k * step) % n]).sum()
        })
        .collect()
}

/// `Σ_m a_m e^{imφ_k}` for `k = 0..n`; `a` indexed `m + top`.
fn ring_synthesis(a: &[C64], top: usize, n: usize, roots: &[C64]) -> Vec<C64> {
    (0..n)
        .map(|k| {
            a.iter()
                .enumerate()
                .map(|(i, c)| {
                    let m = i as i64 - top as i64;
                    // e^{+imφ_k} = conj(e^{-imφ_k})
                    c * roots[(k * m.rem_euclid(n as i64) as usize) % n].conj()
                })
                .sum()
        })
        .collect()
}

/// `(-1)^m` for negative orders, from `Y_n^{-m} = (-1)^m conj(Y_n^m)`.
fn order_sign(m: i64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

pub fn analyze(grid: &BoundaryGrid, values: &[C64], truncation: usize) -> Result<SpectralTrace> {
    check(grid, values, truncation)?;
    let mut out = SpectralTrace::zeros(grid.dim, grid.radius, truncation);
    match &grid.layout {
        BoundaryLayout::Circle { n_theta } => {
            let roots = roots_of_unity(*n_theta);
            let scale = (2.0 * PI * grid.radius).sqrt() / *n_theta as f64;
            out.coeffs = ring_dft(values, truncation, &roots).into_iter().map(|c| c * scale).collect();
        }
        BoundaryLayout::Sphere { n_theta, n_phi, cos_theta, gl_weights } => {
            let roots = roots_of_unity(*n_phi);
            let dphi = 2.0 * PI / *n_phi as f64;
            let big_n = truncation as i64;
            for i in 0..*n_theta {
                let ring = &values[i * n_phi..(i + 1) * n_phi];
                let u_m = ring_dft(ring, truncation, &roots);
                let w = grid.radius * gl_weights[i] * dphi;
                for m in 0..=truncation {
                    let col = normalized_legendre_column(m, truncation, cos_theta[i]);
                    for (k, p) in col.iter().enumerate() {
                        let n = (m + k) as i64;
                        let mi = m as i64;
                        let pos = (n * n + n + mi) as usize;
                        out.coeffs[pos] += u_m[(mi + big_n) as usize] * (w * p);
                        if m > 0 {
                            let neg = (n * n + n - mi) as usize;
                            out.coeffs[neg] += u_m[(big_n - mi) as usize] * (w * p * order_sign(-mi));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn synthesize(grid: &BoundaryGrid, trace: &SpectralTrace) -> Result<Vec<C64>> {
    if trace.dim != grid.dim || trace.coeffs.len() != coefficient_count(trace.dim, trace.truncation) {
        return Err(Error::Shape("spectral trace does not match the grid".into()));
    }
    let max = max_truncation(grid);
    if trace.truncation > max {
        return Err(Error::Cap { what: "spectral truncation N", value: trace.truncation, max });
    }
    let n_trunc = trace.truncation;
    match &grid.layout {
        BoundaryLayout::Circle { n_theta } => {
            let roots = roots_of_unity(*n_theta);
            let scale = 1.0 / (2.0 * PI * grid.radius).sqrt();
            let a: Vec<C64> = trace.coeffs.iter().map(|c| c * scale).collect();
            Ok(ring_synthesis(&a, n_trunc, *n_theta, &roots))
        }
        BoundaryLayout::Sphere { n_theta, n_phi, cos_theta, .. } => {
            let roots = roots_of_unity(*n_phi);
            let big_n = n_trunc as i64;
            let mut out = Vec::with_capacity(grid.len());
            for t in cos_theta.iter().take(*n_theta) {
                let mut v = vec![C64::new(0.0, 0.0); 2 * n_trunc + 1];
                for m in 0..=n_trunc {
                    let col = normalized_legendre_column(m, n_trunc, *t);
                    for (k, p) in col.iter().enumerate() {
                        let n = (m + k) as i64;
                        let mi = m as i64;
                        v[(big_n + mi) as usize] += trace.coeffs[(n * n + n + mi) as usize] * *p;
                        if m > 0 {
                            v[(big_n - mi) as usize] += trace.coeffs[(n * n + n - mi) as usize] * (p * order_sign(-mi));
                        }
                    }
                }
                let scale = 1.0 / grid.radius;
                out.extend(ring_synthesis(&v, n_trunc, *n_phi, &roots).into_iter().map(|x| x * scale));
            }
            Ok(out)
        }
    }
}

/// `κ H'_n(κR)/H_n(κR)` (or the spherical analogue) for `n = 0..=N`.
pub fn dtn_symbol(dim: Dim, kappa: f64, radius: f64, truncation: usize, cap: OrderCap) -> Result<Vec<C64>> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
    }
    let ratios = match dim {
        Dim::Two => hankel1_dtn_ratios(truncation, kappa * radius, cap)?,
        Dim::Three => sph_hankel1_dtn_ratios(truncation, kappa * radius, cap)?,
    };
    Ok(ratios.into_iter().map(|r| r * kappa).collect())
}

/// Multiplies each mode of a spectral trace by the DtN symbol.
pub fn apply_dtn_spectral(trace: &SpectralTrace, kappa: f64, cap: OrderCap) -> Result<SpectralTrace> {
    let symbol = dtn_symbol(trace.dim, kappa, trace.radius, trace.truncation, cap)?;
    let mut out = trace.clone();
    let big_n = trace.truncation as i64;
    match trace.dim {
        Dim::Two => {
            for (i, c) in out.coeffs.iter_mut().enumerate() {
                *c *= symbol[(i as i64 - big_n).unsigned_abs() as usize];
            }
        }
        Dim::Three => {
            for n in 0..=trace.truncation {
                for c in &mut out.coeffs[n * n..(n + 1) * (n + 1)] {
                    *c *= symbol[n];
                }
            }
        }
    }
    Ok(out)
}

/// `ℬv` on the grid, with truncation `N` (default `⌈κR⌉ + 32`).
pub fn apply_dtn(grid: &BoundaryGrid, values: &[C64], kappa: f64, truncation: Option<usize>) -> Result<Vec<C64>> {
    let n = truncation.unwrap_or_else(|| default_truncation(kappa, grid.radius));
    let trace = analyze(grid, values, n)?;
    synthesize(grid, &apply_dtn_spectral(&trace, kappa, OrderCap::default())?)
}

/// Copy of `data` whose Neumann trace is `ℬ(dirichlet)`; any previous
/// Neumann trace is replaced.
pub fn neumann_from_dirichlet(data: &BoundaryData, truncation: Option<usize>) -> Result<BoundaryData> {
    let neumann = apply_dtn(&data.grid, &data.dirichlet, data.kappa, truncation)?;
    BoundaryData::new(data.kappa, data.grid.clone(), data.dirichlet.clone(), Some(neumann))
}
