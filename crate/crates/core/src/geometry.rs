//! Quadrature grids: the observation surface `∂B_R`, a volume grid over the
//! source support `B_r`, and the frequency axis.

use std::f64::consts::PI;

use crate::{Dim, Error, Point, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryLayout {
    /// Uniform angles `θ_j = 2πj/n`.
    Circle { n_theta: usize },
    /// Gauss–Legendre in `cos θ` (ring-major) times uniform azimuth.
    Sphere { n_theta: usize, n_phi: usize, cos_theta: Vec<f64>, gl_weights: Vec<f64> },
}

/// Quadrature on `∂B_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub dim: Dim,
    pub radius: f64,
    pub nodes: Vec<Point>,
    /// Outward unit normals, `node / R`.
    pub normals: Vec<Point>,
    pub weights: Vec<f64>,
    pub layout: BoundaryLayout,
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(n_theta, n_phi)`; `n_phi` is zero for a circle.
    pub fn counts(&self) -> (usize, usize) {
        match &self.layout {
            BoundaryLayout::Circle { n_theta } => (*n_theta, 0),
            BoundaryLayout::Sphere { n_theta, n_phi, .. } => (*n_theta, *n_phi),
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Config(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

pub fn make_circle_grid(radius: f64, n_theta: usize) -> Result<BoundaryGrid> {
    check_radius(radius)?;
    if n_theta < 8 {
        return Err(Error::Config(format!("circle grid needs at least 8 nodes, got {n_theta}")));
    }
    let mut nodes = Vec::with_capacity(n_theta);
    let mut normals = Vec::with_capacity(n_theta);
    for j in 0..n_theta {
        let (s, c) = (2.0 * PI * j as f64 / n_theta as f64).sin_cos();
        nodes.push([radius * c, radius * s, 0.0]);
        normals.push([c, s, 0.0]);
    }
    Ok(BoundaryGrid {
        dim: Dim::Two,
        radius,
        nodes,
        normals,
        weights: vec![2.0 * PI * radius / n_theta as f64; n_theta],
        layout: BoundaryLayout::Circle { n_theta },
    })
}

pub fn make_sphere_grid(radius: f64, n_theta: usize, n_phi: usize) -> Result<BoundaryGrid> {
    check_radius(radius)?;
    if n_theta < 2 || n_phi < 4 {
        return Err(Error::Config(format!("sphere grid needs n_theta ≥ 2 and n_phi ≥ 4, got {n_theta}×{n_phi}")));
    }
    let (cos_theta, gl_weights) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut normals = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (t, gw) in cos_theta.iter().zip(&gl_weights) {
        let st = (1.0 - t * t).sqrt();
        for k in 0..n_phi {
            let (sp, cp) = (dphi * k as f64).sin_cos();
            let n = [st * cp, st * sp, *t];
            nodes.push([radius * n[0], radius * n[1], radius * n[2]]);
            normals.push(n);
            weights.push(radius * radius * gw * dphi);
        }
    }
    Ok(BoundaryGrid {
        dim: Dim::Three,
        radius,
        nodes,
        normals,
        weights,
        layout: BoundaryLayout::Sphere { n_theta, n_phi, cos_theta, gl_weights },
    })
}

/// Circle grid for `d = 2` (ignores `n_phi`), sphere grid for `d = 3`.
pub fn make_boundary_grid(dim: Dim, radius: f64, n_theta: usize, n_phi: usize) -> Result<BoundaryGrid> {
    match dim {
        Dim::Two => make_circle_grid(radius, n_theta),
        Dim::Three => make_sphere_grid(radius, n_theta, n_phi),
    }
}

/// Cell-centred tensor grid clipped to the open ball `|y| < r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGrid {
    pub dim: Dim,
    pub radius: f64,
    /// Cells per diameter.
    pub resolution: usize,
    pub spacing: f64,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl BallGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_k w_k g(y_k)`.
    pub fn integrate(&self, mut g: impl FnMut(&Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(y, w)| w * g(y)).sum()
    }
}

pub fn make_ball_grid(dim: Dim, radius: f64, resolution: usize) -> Result<BallGrid> {
    check_radius(radius)?;
    if resolution < 16 {
        return Err(Error::Config(format!("ball grid resolution must be ≥ 16, got {resolution}")));
    }
    let h = 2.0 * radius / resolution as f64;
    let coord = |i: usize| -radius + (i as f64 + 0.5) * h;
    let r2 = radius * radius;
    let mut nodes = Vec::new();
    match dim {
        Dim::Two => {
            for i in 0..resolution {
                for j in 0..resolution {
                    let p = [coord(i), coord(j), 0.0];
                    if p[0] * p[0] + p[1] * p[1] < r2 {
                        nodes.push(p);
                    }
                }
            }
        }
        Dim::Three => {
            for i in 0..resolution {
                for j in 0..resolution {
                    for k in 0..resolution {
                        let p = [coord(i), coord(j), coord(k)];
                        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < r2 {
                            nodes.push(p);
                        }
                    }
                }
            }
        }
    }
    let cell = h.powi(dim.as_usize() as i32);
    let weights = vec![cell; nodes.len()];
    Ok(BallGrid { dim, radius, resolution, spacing: h, nodes, weights })
}

/// Composite Simpson weights for `n` equal intervals of width `h`; an odd
/// interval count closes with the 3/8 rule, a single interval is a trapezoid.
pub fn composite_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    let n = n_intervals;
    let mut w = vec![0.0; n + 1];
    match n {
        0 => {}
        1 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        _ => {
            let simpson_end = if n.is_multiple_of(2) { n } else { n - 3 };
            for i in (0..simpson_end).step_by(2) {
                w[i] += h / 3.0;
                w[i + 1] += 4.0 * h / 3.0;
                w[i + 2] += h / 3.0;
            }
            if n % 2 == 1 {
                let s = simpson_end;
                w[s] += 3.0 * h / 8.0;
                w[s + 1] += 9.0 * h / 8.0;
                w[s + 2] += 9.0 * h / 8.0;
                w[s + 3] += 3.0 * h / 8.0;
            }
        }
    }
    w
}

/// Nodes and weights for integrals over a band of wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    /// Name of the rule that built the grid.
    pub rule: &'static str,
    pub kappas: Vec<f64>,
    /// Weights for `∫ g(κ) dκ` over `[lower, K]`.
    pub weights: Vec<f64>,
    pub kappa_min: f64,
    pub k_max: f64,
    /// Lower end of the integration interval: `0` or `kappa_min`.
    pub lower: f64,
    pub step: f64,
}

impl FreqGrid {
    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Abscissa index of `s` on the uniform lattice `lower + j·step`, if `s`
    /// lies on it within a relative tolerance.
    fn lattice_index(&self, s: f64) -> Option<usize> {
        let t = (s - self.lower) / self.step;
        let j = t.round();
        if j >= 0.0 && (t - j).abs() < 1e-8 * t.abs().max(1.0) {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Weights over `kappas` for `∫_a^b g(κ) dκ`, with `a` and `b` on the
    /// lattice (`a` may be the lower end). Entries outside the band are zero.
    pub fn band_weights(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let top = self.lower + self.step * (self.len() - 1 + self.origin_offset()) as f64;
        if a < self.lower - 1e-12 || b > top * (1.0 + 1e-12) || a > b {
            return Err(Error::Range(format!("band [{a}, {b}] not inside the simulated band [{}, {top}]", self.lower)));
        }
        let (ia, ib) = match (self.lattice_index(a), self.lattice_index(b)) {
            (Some(ia), Some(ib)) => (ia, ib),
            _ => {
                return Err(Error::Range(format!(
                    "band ends {a}, {b} must coincide with frequency nodes (step {})",
                    self.step
                )))
            }
        };
        let local = composite_weights(ib - ia, self.step);
        let off = self.origin_offset();
        let mut w = vec![0.0; self.len()];
        for (k, lw) in local.into_iter().enumerate() {
            let abscissa = ia + k;
            // the origin abscissa carries a vanishing integrand
            if abscissa >= off {
                w[abscissa - off] += lw;
            }
        }
        Ok(w)
    }

    /// 1 when the lattice starts at κ = 0 (not stored), else 0.
    fn origin_offset(&self) -> usize {
        usize::from(self.lower == 0.0)
    }
}

/// Frequency-axis quadrature; rules are looked up by name.
pub trait FrequencyRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, kappa_min: Option<f64>, k_max: f64, n_freq: usize) -> Result<FreqGrid>;
}

fn check_band(kappa_min: f64, k_max: f64, n_freq: usize) -> Result<()> {
    if !(kappa_min > 0.0 && kappa_min < k_max) || !k_max.is_finite() {
        return Err(Error::Config(format!("need 0 < kappa_min < K, got {kappa_min}, {k_max}")));
    }
    if n_freq < 16 {
        return Err(Error::Config(format!("n_freq must be ≥ 16, got {n_freq}")));
    }
    Ok(())
}

/// Simpson on `[κ_min, K]`; the sliver `[0, κ_min)` is left out.
pub struct CutoffSimpson;

impl FrequencyRule for CutoffSimpson {
    fn name(&self) -> &'static str {
        "simpson-cutoff"
    }

    fn build(&self, kappa_min: Option<f64>, k_max: f64, n_freq: usize) -> Result<FreqGrid> {
        let kappa_min = kappa_min.unwrap_or(k_max / n_freq as f64);
        check_band(kappa_min, k_max, n_freq)?;
        let step = (k_max - kappa_min) / (n_freq - 1) as f64;
        let kappas = (0..n_freq).map(|j| kappa_min + step * j as f64).collect();
        Ok(FreqGrid {
            rule: self.name(),
            kappas,
            weights: composite_weights(n_freq - 1, step),
            kappa_min,
            k_max,
            lower: kappa_min,
            step,
        })
    }
}

/// Simpson on `[0, K]` over the lattice `κ_j = jK/n`, `j = 1..n`. The `κ = 0`
/// node is dropped: every integrand on this axis carries `κ^{d-1}` and
/// vanishes there.
pub struct OriginSimpson;

impl FrequencyRule for OriginSimpson {
    fn name(&self) -> &'static str {
        "simpson-origin"
    }

    fn build(&self, kappa_min: Option<f64>, k_max: f64, n_freq: usize) -> Result<FreqGrid> {
        let step = k_max / n_freq as f64;
        check_band(step, k_max, n_freq)?;
        if let Some(km) = kappa_min {
            if (km - step).abs() > 1e-12 * step {
                return Err(Error::Config(format!("simpson-origin requires kappa_min = K/n_freq = {step}, got {km}")));
            }
        }
        let kappas = (1..=n_freq).map(|j| step * j as f64).collect();
        let weights = composite_weights(n_freq, step)[1..].to_vec();
        Ok(FreqGrid { rule: self.name(), kappas, weights, kappa_min: step, k_max, lower: 0.0, step })
    }
}

static FREQUENCY_RULES: [&dyn FrequencyRule; 2] = [&OriginSimpson, &CutoffSimpson];

pub fn frequency_rules() -> &'static [&'static dyn FrequencyRule] {
    &FREQUENCY_RULES
}

pub fn frequency_rule(name: &str) -> Result<&'static dyn FrequencyRule> {
    FREQUENCY_RULES.iter().copied().find(|r| r.name() == name).ok_or_else(|| {
        let known: Vec<_> = FREQUENCY_RULES.iter().map(|r| r.name()).collect();
        Error::Config(format!("unknown frequency rule {name:?}; known: {}", known.join(", ")))
    })
}

/// Grid on `[κ_min, K]`; `κ_min` defaults to `K / n_freq`.
pub fn make_freq_grid(kappa_min: Option<f64>, k_max: f64, n_freq: usize) -> Result<FreqGrid> {
    CutoffSimpson.build(kappa_min, k_max, n_freq)
}

/// Grid on `[0, K]` with nodes `jK/n_freq`.
pub fn make_anchored_freq_grid(k_max: f64, n_freq: usize) -> Result<FreqGrid> {
    OriginSimpson.build(None, k_max, n_freq)
}
