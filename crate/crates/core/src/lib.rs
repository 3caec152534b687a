//! Multi-frequency inverse source problem for the Helmholtz equation
//! `Δu + κ²u = f` in two and three dimensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: cylindrical/spherical Bessel and Hankel functions, DtN
//!   symbols and orthonormal spherical harmonics.
//! * [`geometry`]: quadrature grids on `∂B_R`, inside `B_r` and in frequency.
//! * [`sources`]: parametric source families behind the [`sources::RadialProfile`]
//!   trait, selected by name through a registry.
//! * [`forward`]: radiating traces on `∂B_R` via the outgoing Green's kernel.
//! * [`dtn`]: the Dirichlet-to-Neumann operator as a truncated spectral series.
//! * [`spectral`]: Fourier data extraction from boundary traces and low-pass
//!   reconstruction.
//! * [`metrics`]: data functionals, energy integrals and stability bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Several kernels index parallel arrays by mode or node number.
#![allow(clippy::needless_range_loop)]

pub mod dtn;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod metrics;
pub mod sources;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};

/// Complex scalar used for all fields, traces and transforms.
pub type C64 = num_complex::Complex64;

/// Points and vectors are stored with three components; the third is zero in 2D.
pub type Point = [f64; 3];

/// Spatial dimension of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(Error::Config(format!("dimension must be 2 or 3, got {other}"))),
        }
    }

    /// Surface measure of the unit sphere `S^{d-1}`.
    pub fn unit_sphere_area(self) -> f64 {
        match self {
            Dim::Two => 2.0 * std::f64::consts::PI,
            Dim::Three => 4.0 * std::f64::consts::PI,
        }
    }

    /// Volume of the ball of radius `r`.
    pub fn ball_volume(self, r: f64) -> f64 {
        match self {
            Dim::Two => std::f64::consts::PI * r * r,
            Dim::Three => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
        }
    }

    /// Area of the sphere `∂B_R`.
    pub fn sphere_area(self, radius: f64) -> f64 {
        match self {
            Dim::Two => 2.0 * std::f64::consts::PI * radius,
            Dim::Three => 4.0 * std::f64::consts::PI * radius * radius,
        }
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_usize())
    }
}

#[inline]
pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}
