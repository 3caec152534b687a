//! Data functionals, band energies and the terms of the stability estimate.

use std::f64::consts::PI;

use crate::dtn::apply_dtn;
use crate::forward::BoundaryData;
use crate::geometry::FreqGrid;
use crate::sources::SourceField;
use crate::spectral::Reconstruction;
use crate::{Dim, Error, Result, C64};

/// `∫_{∂B_R} |ℬv|² + κ²|v|² dγ` (squared form, no square root).
pub fn data_functional(v: &BoundaryData, truncation: Option<usize>) -> Result<f64> {
    let bv = apply_dtn(&v.grid, &v.dirichlet, v.kappa, truncation)?;
    Ok(weighted_energy(&v.grid.weights, &bv, &v.dirichlet, v.kappa))
}

/// Same functional with the stored Neumann trace in place of `ℬv`.
pub fn trace_functional(v: &BoundaryData) -> Result<f64> {
    Ok(weighted_energy(&v.grid.weights, v.neumann()?, &v.dirichlet, v.kappa))
}

fn weighted_energy(w: &[f64], neumann: &[C64], dirichlet: &[C64], kappa: f64) -> f64 {
    w.iter()
        .zip(neumann.iter().zip(dirichlet))
        .map(|(w, (n, d))| w * (n.norm_sqr() + kappa * kappa * d.norm_sqr()))
        .sum()
}

fn check_blocks(data: &[BoundaryData], freq: &FreqGrid) -> Result<()> {
    if data.is_empty() || freq.is_empty() {
        return Err(Error::Shape("no frequencies".into()));
    }
    if data.len() != freq.len() {
        return Err(Error::Shape(format!("{} data blocks for {} frequencies", data.len(), freq.len())));
    }
    for (d, k) in data.iter().zip(&freq.kappas) {
        if (d.kappa - k).abs() > 1e-12 * k.max(1.0) {
            return Err(Error::Shape(format!("data at κ = {} does not match grid node {k}", d.kappa)));
        }
    }
    Ok(())
}

/// `ε = (Σ_κ w_κ κ^{d-1} data_functional(v_κ))^{1/2}` for difference data `v`.
pub fn epsilon_functional(diff: &[BoundaryData], freq: &FreqGrid, truncation: Option<usize>) -> Result<f64> {
    check_blocks(diff, freq)?;
    let p = diff[0].grid.dim.as_usize() as i32 - 1;
    let mut acc = 0.0;
    for (v, (k, w)) in diff.iter().zip(freq.kappas.iter().zip(&freq.weights)) {
        acc += w * k.powi(p) * data_functional(v, truncation)?;
    }
    Ok(acc.sqrt())
}

/// Pointwise difference `a - b` of Dirichlet traces, Neumann dropped.
pub fn dirichlet_difference(a: &BoundaryData, b: &BoundaryData) -> Result<BoundaryData> {
    if a.dirichlet.len() != b.dirichlet.len() || a.kappa != b.kappa {
        return Err(Error::Shape("traces at different κ or on different grids".into()));
    }
    let d = a.dirichlet.iter().zip(&b.dirichlet).map(|(x, y)| x - y).collect();
    BoundaryData::new(a.kappa, a.grid.clone(), d, None)
}

/// Per-frequency boundary energies `∫|u|²` and `∫|∂_ν u|²` with the frequency
/// rule they were sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub dim: Dim,
    pub freq: FreqGrid,
    pub dirichlet: Vec<f64>,
    pub neumann: Vec<f64>,
}

impl EnergyProfile {
    /// Requires a Neumann trace in every block.
    pub fn from_traces(data: &[BoundaryData], freq: &FreqGrid) -> Result<Self> {
        check_blocks(data, freq)?;
        let mut dirichlet = Vec::with_capacity(data.len());
        let mut neumann = Vec::with_capacity(data.len());
        for v in data {
            let w = &v.grid.weights;
            dirichlet.push(w.iter().zip(&v.dirichlet).map(|(w, u)| w * u.norm_sqr()).sum());
            neumann.push(w.iter().zip(v.neumann()?).map(|(w, u)| w * u.norm_sqr()).sum());
        }
        Ok(EnergyProfile { dim: data[0].grid.dim, freq: freq.clone(), dirichlet, neumann })
    }

    fn integrate(&self, weights: &[f64], dirichlet_power: i32, neumann_power: i32) -> (f64, f64) {
        let mut i1 = 0.0;
        let mut i2 = 0.0;
        for (j, w) in weights.iter().enumerate() {
            let k = self.freq.kappas[j];
            i1 += w * k.powi(dirichlet_power) * self.dirichlet[j];
            i2 += w * k.powi(neumann_power) * self.neumann[j];
        }
        (i1, i2)
    }

    /// `(∫ κ^{d+1}∫|u|², ∫ κ^{d-1}∫|∂_ν u|²)` over `[a, b]`.
    pub fn band(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let w = self.freq.band_weights(a, b)?;
        let d = self.dim.as_usize() as i32;
        Ok(self.integrate(&w, d + 1, d - 1))
    }

    /// `(I₁(s), I₂(s))` from the lower end of the frequency rule to `s`.
    pub fn i1_i2(&self, s: f64) -> Result<(f64, f64)> {
        self.band(self.freq.lower, s)
    }

    /// `∫_s^{s_max} κ^{d-1} ∫ |∂_ν u|² + κ²|u|²`, `s_max` the top node.
    pub fn tail_integral(&self, s: f64) -> Result<f64> {
        let top = *self.freq.kappas.last().expect("nonempty");
        if s < 1.0 {
            return Err(Error::Range(format!("tail integral needs s ≥ 1, got {s}")));
        }
        let (a, b) = self.band(s, top)?;
        Ok(a + b)
    }

    pub fn s_max(&self) -> f64 {
        *self.freq.kappas.last().expect("nonempty")
    }
}

/// Least-squares slope of `ln tail` against `ln s`; the ladder must span a
/// factor of at least 8.
pub fn tail_slope_fit(s: &[f64], tails: &[f64]) -> Result<f64> {
    if s.len() != tails.len() || s.len() < 2 {
        return Err(Error::Shape("slope fit needs matching ladders of length ≥ 2".into()));
    }
    let (lo, hi) = s.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if hi / lo < 8.0 {
        return Err(Error::Range(format!("s ladder spans {:.3}, need a factor ≥ 8", hi / lo)));
    }
    if tails.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Range("tail values must be positive for a log fit".into()));
    }
    let x: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = tails.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// Upper bounds for `(I₁(s), I₂(s))` at real `s > 0`, given `‖f₁-f₂‖²_{L²}`
/// and `‖f₁-f₂‖²_{H¹}`.
pub fn energy_bound(dim: Dim, s: f64, radius: f64, l2_sq: f64, h1_sq: f64) -> (f64, f64) {
    let c = 16.0 * PI.powi(3);
    let r3 = radius.powi(3);
    match dim {
        Dim::Two => (c * r3 * s.powi(5) * l2_sq, c * r3 * s.powi(3) * h1_sq),
        Dim::Three => {
            let r4 = radius.powi(4);
            (c * (s.powi(3) * r3 + s.powi(4) * r4) * l2_sq, c * (s.powi(2) * r3 + s.powi(3) * r4) * h1_sq)
        }
    }
}

/// `C` in `‖f‖² ≤ C ∫₀^∞ κ^{d-1} ∫_{∂B_R} |∂_ν u|² + κ²|u|²`:
/// `2 (2π)^{-d} |S^{d-1}| |∂B_R|`.
pub fn plancherel_constant(dim: Dim, radius: f64) -> f64 {
    2.0 * (2.0 * PI).powi(-(dim.as_usize() as i32)) * dim.unit_sphere_area() * dim.sphere_area(radius)
}

/// Lower bound on the harmonic-measure exponent at `s > K`.
pub fn mu(s: f64, k: f64) -> Result<f64> {
    if !(k > 0.0) || !(s > k) {
        return Err(Error::Range(format!("μ(s) is defined for s > K > 0, got s = {s}, K = {k}")));
    }
    let t = s / k;
    if t <= 2f64.powf(0.25) {
        Ok(0.5)
    } else {
        Ok(1.0 / (PI * (t.powi(4) - 1.0).sqrt()))
    }
}

/// The two terms on the right of the stability estimate, generic constant excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityBudget {
    pub epsilon: f64,
    pub k_max: f64,
    pub n: usize,
    pub m: f64,
    pub radius: f64,
    pub dim: Dim,
    /// `ε²`.
    pub term_data: f64,
    /// `M² / (K^{2/3} |ln ε|^{1/4} / ((R+1)(6n-6d+3)³))^{2n-2d+1}`.
    pub term_tail: f64,
}

impl StabilityBudget {
    /// Requires `0 ≤ ε < e^{-1}`, `n ≥ d`, `K > 1`. At `ε = 0` the tail term is
    /// its limit, zero.
    pub fn new(epsilon: f64, k_max: f64, n: usize, m: f64, radius: f64, dim: Dim) -> Result<Self> {
        let d = dim.as_usize();
        if !(epsilon >= 0.0 && epsilon < (-1.0f64).exp()) {
            return Err(Error::Range(format!("the estimate assumes 0 ≤ ε < e^-1, got ε = {epsilon}")));
        }
        if n < d {
            return Err(Error::Range(format!("the estimate assumes n ≥ d = {d}, got n = {n}")));
        }
        if !(k_max > 1.0) {
            return Err(Error::Range(format!("the estimate assumes K > 1, got K = {k_max}")));
        }
        let p = (2 * n - 2 * d + 1) as i32;
        let term_tail = if epsilon == 0.0 {
            0.0
        } else {
            let q = (6 * n - 6 * d + 3) as f64;
            let base = k_max.powf(2.0 / 3.0) * (-epsilon.ln()).powf(0.25) / ((radius + 1.0) * q.powi(3));
            m * m / base.powi(p)
        };
        Ok(StabilityBudget { epsilon, k_max, n, m, radius, dim, term_data: epsilon * epsilon, term_tail })
    }
}

pub fn stability_bound(budget: &StabilityBudget) -> f64 {
    budget.term_data + budget.term_tail
}

/// `‖a - f‖_{L², grid}` on the reconstruction's grid.
pub fn l2_error(a: &Reconstruction, f: &SourceField) -> Result<f64> {
    if a.grid.dim != f.dim {
        return Err(Error::Shape("reconstruction and source differ in dimension".into()));
    }
    Ok(a.values
        .iter()
        .zip(a.grid.nodes.iter().zip(&a.grid.weights))
        .map(|(v, (y, w))| w * (v - f.evaluate(y)).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `‖a - b‖_{L², grid}` for two reconstructions on the same grid.
pub fn l2_distance(a: &Reconstruction, b: &Reconstruction) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::Shape("reconstructions live on different grids".into()));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .zip(&a.grid.weights)
        .map(|((x, y), w)| w * (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `‖f‖_{L², grid}` of a source sampled on the grid of `a`.
pub fn l2_norm_on(a: &Reconstruction, f: &SourceField) -> f64 {
    a.grid.integrate(|y| f.evaluate(y).norm_sqr()).sqrt()
}
