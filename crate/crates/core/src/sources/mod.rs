//! Admissible sources: finite sums `f(y) = Σ_j a_j F_j(|y - c_j|²)` of radial
//! profiles, cut to zero outside `B_r`.

mod profiles;

use std::sync::Arc;

pub use profiles::{
    build_profile, families, radial_transform, BumpPoly, FamilyEntry, FourierBessel, Gaussian, ProfileBuilder,
    ProfileParams, Quality, RadialProfile, SUPPORT_TOLERANCE,
};

use crate::geometry::BallGrid;
use crate::{dot, norm, sub, Dim, Error, Point, Result, C64};

/// Highest Sobolev order with closed-form derivatives.
pub const SOBOLEV_ORDER_MAX: usize = 8;

#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub center: Point,
    pub amplitude: C64,
    pub profile: Arc<dyn RadialProfile>,
}

#[derive(Debug, Clone)]
pub struct SourceField {
    pub dim: Dim,
    pub support_radius: f64,
    pub terms: Vec<SourceTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierValue {
    pub value: C64,
    pub quality: Quality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevEstimate {
    pub order: usize,
    /// `sqrt(Σ_{|α| ≤ order} ‖∂^α f‖²)`.
    pub value: f64,
    /// `Σ_{|α| = k} ‖∂^α f‖²` for `k = 0 ..= order`.
    pub by_order: Vec<f64>,
}

impl SobolevEstimate {
    /// Norm of a lower order, read off the same sums.
    pub fn at_order(&self, k: usize) -> Option<f64> {
        (k <= self.order).then(|| self.by_order[..=k].iter().sum::<f64>().sqrt())
    }
}

impl SourceField {
    /// Rejects fields whose profiles reach past `support_radius`.
    pub fn new(dim: Dim, support_radius: f64, terms: Vec<SourceTerm>) -> Result<Self> {
        if !(support_radius > 0.0) || !support_radius.is_finite() {
            return Err(Error::Config(format!("support radius must be positive, got {support_radius}")));
        }
        if terms.is_empty() {
            return Err(Error::Config("a source needs at least one term".into()));
        }
        for t in &terms {
            if dim == Dim::Two && t.center[2] != 0.0 {
                return Err(Error::Config("2D source centres must have zero third component".into()));
            }
            let outer = norm(&t.center) + t.profile.reach();
            if outer > support_radius * (1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "{} term at |c| = {:.4} reaches {outer:.4} > support radius {support_radius}",
                    t.profile.family(),
                    norm(&t.center)
                )));
            }
        }
        Ok(SourceField { dim, support_radius, terms })
    }

    /// Requires the margin `R - r ≥ 0.1 R` between support and observation sphere.
    pub fn check_observation_radius(&self, radius: f64) -> Result<()> {
        if radius - self.support_radius < 0.1 * radius * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "support radius {} too close to observation radius {radius} (need R - r ≥ 0.1 R)",
                self.support_radius
            )));
        }
        Ok(())
    }

    /// Name of the family, or `"mixed"`.
    pub fn family(&self) -> &'static str {
        let first = self.terms[0].profile.family();
        if self.terms.iter().all(|t| t.profile.family() == first) {
            first
        } else {
            "mixed"
        }
    }

    /// Concatenation of the terms of `self` and `other`.
    pub fn plus(&self, other: &SourceField) -> Result<SourceField> {
        if self.dim != other.dim {
            return Err(Error::Shape("cannot add sources of different dimension".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SourceField::new(self.dim, self.support_radius.max(other.support_radius), terms)
    }

    pub fn scaled(&self, factor: C64) -> SourceField {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amplitude *= factor;
        }
        out
    }

    pub fn evaluate(&self, y: &Point) -> C64 {
        if dot(y, y) >= self.support_radius * self.support_radius {
            return C64::new(0.0, 0.0);
        }
        self.terms
            .iter()
            .map(|t| {
                let z = sub(y, &t.center);
                t.amplitude * t.profile.value(dot(&z, &z))
            })
            .sum()
    }

    /// `f̂(ξ) = ∫ f(y) e^{-iξ·y} dy`.
    pub fn analytic_fourier(&self, xi: &Point) -> FourierValue {
        let q = norm(xi);
        let mut quality = Quality::Exact;
        let mut value = C64::new(0.0, 0.0);
        for t in &self.terms {
            let (radial, qual) = t.profile.transform(self.dim, q);
            if qual == Quality::Quadrature {
                quality = Quality::Quadrature;
            }
            value += t.amplitude * C64::from_polar(radial, -dot(xi, &t.center));
        }
        FourierValue { value, quality }
    }

    /// Discrete `H^order` norm on `grid` from closed-form derivatives.
    pub fn sobolev_norm(&self, order: usize, grid: &BallGrid) -> Result<SobolevEstimate> {
        if order > SOBOLEV_ORDER_MAX {
            return Err(Error::Cap { what: "Sobolev order", value: order, max: SOBOLEV_ORDER_MAX });
        }
        if grid.dim != self.dim {
            return Err(Error::Shape(format!("grid is {}D, source is {}D", grid.dim, self.dim)));
        }
        for t in &self.terms {
            if let Some(k) = t.profile.smoothness() {
                if order > k {
                    return Err(Error::Domain(format!(
                        "{} profile has weak derivatives only up to order {k}, asked for {order}",
                        t.profile.family()
                    )));
                }
            }
        }
        let alphas = multi_indices(self.dim.as_usize(), order);
        let mut by_order = vec![0.0; order + 1];
        let mut fd = vec![0.0; order + 1];
        let mut partials = vec![C64::new(0.0, 0.0); alphas.len()];
        // fac[i][a][b] = a!/(b!(a-2b)!) (2 z_i)^{a-2b}
        let mut fac = [[[0.0; SOBOLEV_ORDER_MAX / 2 + 1]; SOBOLEV_ORDER_MAX + 1]; 3];
        for (y, w) in grid.nodes.iter().zip(&grid.weights) {
            if dot(y, y) >= self.support_radius * self.support_radius {
                continue;
            }
            partials.iter_mut().for_each(|p| *p = C64::new(0.0, 0.0));
            for t in &self.terms {
                let z = sub(y, &t.center);
                t.profile.derivatives(dot(&z, &z), &mut fd);
                for (i, fi) in fac.iter_mut().enumerate() {
                    for a in 0..=order {
                        for b in 0..=a / 2 {
                            fi[a][b] = FACT[a] / (FACT[b] * FACT[a - 2 * b]) * (2.0 * z[i]).powi((a - 2 * b) as i32);
                        }
                    }
                }
                for (alpha, p) in alphas.iter().zip(partials.iter_mut()) {
                    let total = alpha[0] + alpha[1] + alpha[2];
                    let mut acc = 0.0;
                    for b0 in 0..=alpha[0] / 2 {
                        for b1 in 0..=alpha[1] / 2 {
                            for b2 in 0..=alpha[2] / 2 {
                                acc += fac[0][alpha[0]][b0]
                                    * fac[1][alpha[1]][b1]
                                    * fac[2][alpha[2]][b2]
                                    * fd[total - b0 - b1 - b2];
                            }
                        }
                    }
                    *p += t.amplitude * acc;
                }
            }
            for (alpha, p) in alphas.iter().zip(&partials) {
                by_order[alpha[0] + alpha[1] + alpha[2]] += w * p.norm_sqr();
            }
        }
        Ok(SobolevEstimate { order, value: by_order.iter().sum::<f64>().sqrt(), by_order })
    }
}

const FACT: [f64; SOBOLEV_ORDER_MAX + 1] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

/// All `α ∈ ℕ^3` with `|α| ≤ order`, zero beyond the first `d` slots.
fn multi_indices(d: usize, order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let top2 = if d == 3 { order } else { 0 };
    for a0 in 0..=order {
        for a1 in 0..=order - a0 {
            for a2 in 0..=top2.min(order - a0 - a1) {
                out.push([a0, a1, a2]);
            }
        }
    }
    out
}

/// A family plus placement; the config-facing description of a source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub family: String,
    pub params: ProfileParams,
    pub centers: Vec<Point>,
    pub amplitudes: Vec<C64>,
    pub support_radius: f64,
}

pub const PRESETS: [&str; 4] = ["gaussian", "gaussian_pair", "bump", "bessel"];

impl SourceSpec {
    pub fn preset(name: &str) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let spec = match name {
            "gaussian" => SourceSpec {
                family: "gaussian_sum".into(),
                params: ProfileParams { sigma: Some(0.1), ..Default::default() },
                centers: vec![[0.0; 3]],
                amplitudes: vec![one],
                support_radius: 0.75,
            },
            "gaussian_pair" => SourceSpec {
                family: "gaussian_sum".into(),
                params: ProfileParams { sigma: Some(0.08), ..Default::default() },
                centers: vec![[-0.15, 0.1, 0.0], [0.15, 0.1, 0.0]],
                amplitudes: vec![one, C64::new(0.5, 0.5)],
                support_radius: 0.9,
            },
            "bump" => SourceSpec {
                family: "bump_poly".into(),
                params: ProfileParams { sigma: Some(0.5), power: Some(10), ..Default::default() },
                centers: vec![[0.1, -0.1, 0.0]],
                amplitudes: vec![one],
                support_radius: 0.75,
            },
            "bessel" => SourceSpec {
                family: "fourier_bessel".into(),
                params: ProfileParams { sigma: Some(0.5), power: Some(8), wavenumber: Some(12.0) },
                centers: vec![[0.0; 3]],
                amplitudes: vec![one],
                support_radius: 0.75,
            },
            other => {
                return Err(Error::Config(format!("unknown source preset {other:?}; known: {}", PRESETS.join(", "))))
            }
        };
        Ok(spec)
    }

    pub fn build(&self, dim: Dim) -> Result<SourceField> {
        if self.centers.len() != self.amplitudes.len() {
            return Err(Error::Config(format!(
                "{} centres but {} amplitudes",
                self.centers.len(),
                self.amplitudes.len()
            )));
        }
        let profile = build_profile(&self.family, dim, &self.params)?;
        let terms = self
            .centers
            .iter()
            .zip(&self.amplitudes)
            .map(|(c, a)| SourceTerm { center: *c, amplitude: *a, profile: profile.clone() })
            .collect();
        SourceField::new(dim, self.support_radius, terms)
    }
}

/// Shorthand for `SourceSpec::preset(name)?.build(dim)`.
pub fn preset(name: &str, dim: Dim) -> Result<SourceField> {
    SourceSpec::preset(name)?.build(dim)
}
