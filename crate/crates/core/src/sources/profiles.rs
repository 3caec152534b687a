//! Radial profiles `F(s)`, `s = |y - c|²`, and the name registry.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::geometry::gauss_legendre;
use crate::specfun::{bessel_j, bessel_j_seq, sph_bessel_j_seq};
use crate::{Dim, Error, Result};

/// Ratio of the profile at its reach to its peak.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// How a transform value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quality {
    Exact,
    Quadrature,
}

/// A radially symmetric building block `y ↦ F(|y - c|²)` with `F(0) = 1`.
pub trait RadialProfile: fmt::Debug + Send + Sync {
    fn family(&self) -> &'static str;

    /// Radius beyond which `|F| ≤ SUPPORT_TOLERANCE`; exact zero for compact profiles.
    fn reach(&self) -> f64;

    fn value(&self, s: f64) -> f64;

    /// Writes `F^{(j)}(s)` for `j = 0 .. out.len()`.
    fn derivatives(&self, s: f64, out: &mut [f64]);

    /// Highest order `j` for which `y ↦ F^{(j)}` is still square integrable
    /// as a weak derivative; `None` for smooth profiles.
    fn smoothness(&self) -> Option<usize> {
        None
    }

    /// `∫_{ℝ^d} F(|y|²) e^{-iξ·y} dy` at `|ξ| = q`.
    fn transform(&self, dim: Dim, q: f64) -> (f64, Quality) {
        (radial_transform(dim, q, self.reach(), |s| self.value(s)), Quality::Quadrature)
    }
}

const PANEL_NODES: usize = 32;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Hankel transform of a radial function supported in `[0, rho]`, by
/// panelled Gauss–Legendre with at most ~8 radians of oscillation per panel.
pub fn radial_transform(dim: Dim, q: f64, rho: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = panel_rule();
    let panels = 1 + (q * rho / 8.0).ceil() as usize;
    let h = rho / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(w) {
            let t = a + 0.5 * h * (xi + 1.0);
            let kernel = match dim {
                Dim::Two => 2.0 * PI * t * bessel_j(0, q * t).unwrap_or(0.0),
                Dim::Three => {
                    let z = q * t;
                    let sinc = if z < 1e-4 { 1.0 - z * z / 6.0 } else { z.sin() / z };
                    4.0 * PI * t * t * sinc
                }
            };
            acc += 0.5 * h * wi * kernel * f(t * t);
        }
    }
    acc
}

/// `e^{-s / 2σ²}`.
#[derive(Debug, Clone)]
pub struct Gaussian {
    pub sigma: f64,
}

impl RadialProfile for Gaussian {
    fn family(&self) -> &'static str {
        "gaussian_sum"
    }

    fn reach(&self) -> f64 {
        self.sigma * (-2.0 * SUPPORT_TOLERANCE.ln()).sqrt()
    }

    fn value(&self, s: f64) -> f64 {
        (-s / (2.0 * self.sigma * self.sigma)).exp()
    }

    fn derivatives(&self, s: f64, out: &mut [f64]) {
        let c = -1.0 / (2.0 * self.sigma * self.sigma);
        let mut v = self.value(s);
        for o in out.iter_mut() {
            *o = v;
            v *= c;
        }
    }

    fn transform(&self, dim: Dim, q: f64) -> (f64, Quality) {
        let s2 = self.sigma * self.sigma;
        let mass = (2.0 * PI * s2).powf(dim.as_usize() as f64 / 2.0);
        (mass * (-0.5 * s2 * q * q).exp(), Quality::Exact)
    }
}

/// `(1 - s/σ²)₊^p`.
#[derive(Debug, Clone)]
pub struct BumpPoly {
    pub sigma: f64,
    pub power: u32,
}

/// `j!/(j-k)! (-1/w)^k (1 - s/w)^{j-k}` for the `k`-th derivative of `(1 - s/w)₊^j`.
fn window_derivatives(s: f64, w: f64, power: u32, out: &mut [f64]) {
    let base = 1.0 - s / w;
    for (k, o) in out.iter_mut().enumerate() {
        *o = if base <= 0.0 || k > power as usize {
            0.0
        } else {
            let falling: f64 = (0..k).map(|i| (power as usize - i) as f64).product();
            falling * (-1.0 / w).powi(k as i32) * base.powi((power as usize - k) as i32)
        };
    }
}

impl RadialProfile for BumpPoly {
    fn family(&self) -> &'static str {
        "bump_poly"
    }

    fn reach(&self) -> f64 {
        self.sigma
    }

    fn value(&self, s: f64) -> f64 {
        let b = 1.0 - s / (self.sigma * self.sigma);
        if b <= 0.0 {
            0.0
        } else {
            b.powi(self.power as i32)
        }
    }

    fn derivatives(&self, s: f64, out: &mut [f64]) {
        window_derivatives(s, self.sigma * self.sigma, self.power, out);
    }

    fn smoothness(&self) -> Option<usize> {
        Some(self.power as usize)
    }
}

/// Radial Helmholtz mode `J₀(k|y|)` (d = 2) or `j₀(k|y|)` (d = 3) under the
/// window `(1 - s/a²)₊^p`.
#[derive(Debug, Clone)]
pub struct FourierBessel {
    pub dim: Dim,
    pub wavenumber: f64,
    pub width: f64,
    pub power: u32,
}

impl FourierBessel {
    /// `G^{(i)}(s)` for `G(s) = J₀(k√s)` or `j₀(k√s)`: `(-k²/2)^i Z_i(x)/x^i`.
    fn mode_derivatives(&self, s: f64, out: &mut [f64]) {
        let k = self.wavenumber;
        let x = k * s.max(0.0).sqrt();
        let n = out.len();
        if n == 0 {
            return;
        }
        let scaled: Vec<f64> = if x < 1.0 {
            (0..n).map(|i| self.small_series(i, x)).collect()
        } else {
            let z = match self.dim {
                Dim::Two => bessel_j_seq(n - 1, x),
                Dim::Three => sph_bessel_j_seq(n - 1, x),
            }
            .unwrap_or_else(|_| vec![0.0; n]);
            z.iter().enumerate().map(|(i, v)| v / x.powi(i as i32)).collect()
        };
        let c = -k * k / 2.0;
        for (i, o) in out.iter_mut().enumerate() {
            *o = c.powi(i as i32) * scaled[i];
        }
    }

    /// `Z_i(x)/x^i` by its power series.
    fn small_series(&self, i: usize, x: f64) -> f64 {
        let x2 = x * x;
        let mut sum = 0.0;
        match self.dim {
            Dim::Two => {
                // Σ (-1)^m (x/2)^{2m} / (2^i m! (m+i)!)
                let mut term = 1.0 / (2f64.powi(i as i32) * (1..=i).map(|v| v as f64).product::<f64>());
                for m in 0..30 {
                    sum += term;
                    term *= -x2 / (4.0 * (m + 1) as f64 * (m + 1 + i) as f64);
                }
            }
            Dim::Three => {
                // Σ (-x²/2)^m / (m! (2i+2m+1)!!)
                let dfact: f64 = (0..=i).map(|v| (2 * v + 1) as f64).product();
                let mut term = 1.0 / dfact;
                for m in 0..30 {
                    sum += term;
                    term *= -x2 / (2.0 * (m + 1) as f64 * (2 * i + 2 * m + 3) as f64);
                }
            }
        }
        sum
    }
}

impl RadialProfile for FourierBessel {
    fn family(&self) -> &'static str {
        "fourier_bessel"
    }

    fn reach(&self) -> f64 {
        self.width
    }

    fn value(&self, s: f64) -> f64 {
        let mut v = [0.0];
        self.derivatives(s, &mut v);
        v[0]
    }

    fn derivatives(&self, s: f64, out: &mut [f64]) {
        let n = out.len();
        let mut g = vec![0.0; n];
        let mut w = vec![0.0; n];
        self.mode_derivatives(s, &mut g);
        window_derivatives(s, self.width * self.width, self.power, &mut w);
        for j in 0..n {
            let mut binom = 1.0;
            let mut acc = 0.0;
            for i in 0..=j {
                acc += binom * g[i] * w[j - i];
                binom *= (j - i) as f64 / (i + 1) as f64;
            }
            out[j] = acc;
        }
    }

    fn smoothness(&self) -> Option<usize> {
        Some(self.power as usize)
    }
}

/// Named parameters a family may read.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileParams {
    pub sigma: Option<f64>,
    pub power: Option<u32>,
    pub wavenumber: Option<f64>,
}

fn positive(name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(Error::Config(format!("{name} must be positive, got {x}"))),
        None => Err(Error::Config(format!("{name} is required"))),
    }
}

fn power(v: Option<u32>) -> Result<u32> {
    match v {
        Some(p) if p >= 1 => Ok(p),
        Some(p) => Err(Error::Config(format!("power must be ≥ 1, got {p}"))),
        None => Err(Error::Config("power is required".into())),
    }
}

pub type ProfileBuilder = fn(Dim, &ProfileParams) -> Result<Arc<dyn RadialProfile>>;

pub struct FamilyEntry {
    pub name: &'static str,
    pub build: ProfileBuilder,
}

static FAMILIES: [FamilyEntry; 3] = [
    FamilyEntry { name: "gaussian_sum", build: |_, p| Ok(Arc::new(Gaussian { sigma: positive("sigma", p.sigma)? })) },
    FamilyEntry {
        name: "bump_poly",
        build: |_, p| Ok(Arc::new(BumpPoly { sigma: positive("sigma", p.sigma)?, power: power(p.power)? })),
    },
    FamilyEntry {
        name: "fourier_bessel",
        build: |dim, p| {
            Ok(Arc::new(FourierBessel {
                dim,
                wavenumber: positive("wavenumber", p.wavenumber)?,
                width: positive("sigma", p.sigma)?,
                power: power(p.power)?,
            }))
        },
    },
];

pub fn families() -> &'static [FamilyEntry] {
    &FAMILIES
}

pub fn build_profile(name: &str, dim: Dim, params: &ProfileParams) -> Result<Arc<dyn RadialProfile>> {
    let entry = FAMILIES.iter().find(|e| e.name == name).ok_or_else(|| {
        let known: Vec<_> = FAMILIES.iter().map(|e| e.name).collect();
        Error::Config(format!("unknown source family {name:?}; known: {}", known.join(", ")))
    })?;
    (entry.build)(dim, params)
}
