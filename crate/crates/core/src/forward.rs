//! Radiating traces on `∂B_R`. With `ΔΦ + κ²Φ = -δ` the field `u = -Φ ∗ f`
//! solves `Δu + κ²u = f` in both dimensions.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::geometry::{BallGrid, BoundaryGrid};
use crate::sources::SourceField;
use crate::specfun::hankel01;
use crate::{dot, norm, sub, Dim, Error, Point, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

fn separation(x: &Point, y: &Point) -> Result<(Point, f64)> {
    let d = sub(x, y);
    let rho = norm(&d);
    if !(rho > 1e-300) {
        return Err(Error::Domain("Green's kernel evaluated at coincident points".into()));
    }
    Ok((d, rho))
}

/// Outgoing fundamental solution `Φ_κ(x, y)`.
pub fn green_kernel(dim: Dim, kappa: f64, x: &Point, y: &Point) -> Result<C64> {
    let (_, rho) = separation(x, y)?;
    match dim {
        Dim::Two => Ok(I * 0.25 * hankel01(kappa * rho)?.0),
        Dim::Three => Ok(C64::from_polar(1.0 / (4.0 * PI * rho), kappa * rho)),
    }
}

/// `∇_x Φ_κ(x, y) · ν`.
pub fn green_kernel_normal_deriv(dim: Dim, kappa: f64, x: &Point, normal: &Point, y: &Point) -> Result<C64> {
    let (d, rho) = separation(x, y)?;
    let cos = dot(&d, normal) / rho;
    Ok(radial_derivative(dim, kappa, rho)? * cos)
}

/// `∂_ρ Φ_κ` at distance `ρ`.
fn radial_derivative(dim: Dim, kappa: f64, rho: f64) -> Result<C64> {
    match dim {
        Dim::Two => Ok(-I * 0.25 * kappa * hankel01(kappa * rho)?.1),
        Dim::Three => {
            let kr = kappa * rho;
            Ok(C64::from_polar(1.0 / (4.0 * PI * rho * rho), kr) * C64::new(-1.0, kr))
        }
    }
}

/// `(Φ, ∂_ρ Φ)` sharing one Hankel evaluation.
fn kernel_pair(dim: Dim, kappa: f64, rho: f64) -> Result<(C64, C64)> {
    match dim {
        Dim::Two => {
            let (h0, h1) = hankel01(kappa * rho)?;
            Ok((I * 0.25 * h0, -I * 0.25 * kappa * h1))
        }
        Dim::Three => {
            let kr = kappa * rho;
            let e = C64::from_polar(1.0 / (4.0 * PI * rho), kr);
            Ok((e, e * C64::new(-1.0, kr) / rho))
        }
    }
}

/// Dirichlet and (optionally) Neumann traces at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub kappa: f64,
    pub grid: Arc<BoundaryGrid>,
    pub dirichlet: Vec<C64>,
    pub neumann: Option<Vec<C64>>,
}

impl BoundaryData {
    pub fn new(kappa: f64, grid: Arc<BoundaryGrid>, dirichlet: Vec<C64>, neumann: Option<Vec<C64>>) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
        }
        let n = grid.len();
        if dirichlet.len() != n || neumann.as_ref().is_some_and(|v| v.len() != n) {
            return Err(Error::Shape(format!("trace lengths do not match the {n} boundary nodes")));
        }
        Ok(BoundaryData { kappa, grid, dirichlet, neumann })
    }

    pub fn neumann(&self) -> Result<&[C64]> {
        self.neumann.as_deref().ok_or_else(|| Error::State(format!("no Neumann trace at κ = {}", self.kappa)))
    }
}

/// Source samples `w_k f(y_k)` prepared once and reused across wavenumbers.
#[derive(Debug, Clone)]
pub struct ForwardSolver {
    dim: Dim,
    grid: Arc<BoundaryGrid>,
    points: Vec<Point>,
    masses: Vec<C64>,
}

impl ForwardSolver {
    pub fn new(source: &SourceField, boundary: Arc<BoundaryGrid>, ball: &BallGrid) -> Result<Self> {
        if source.dim != boundary.dim || ball.dim != boundary.dim {
            return Err(Error::Shape(format!(
                "dimension mismatch: source {}D, boundary {}D, ball {}D",
                source.dim, boundary.dim, ball.dim
            )));
        }
        source.check_observation_radius(boundary.radius)?;
        if ball.radius >= boundary.radius {
            return Err(Error::Config(format!(
                "volume grid radius {} must be below the observation radius {}",
                ball.radius, boundary.radius
            )));
        }
        let (mut points, mut masses) = (Vec::new(), Vec::new());
        for (y, w) in ball.nodes.iter().zip(&ball.weights) {
            let v = source.evaluate(y);
            if v != C64::new(0.0, 0.0) {
                points.push(*y);
                masses.push(v * *w);
            }
        }
        Ok(ForwardSolver { dim: source.dim, grid: boundary, points, masses })
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// Number of volume nodes carrying a nonzero source value.
    pub fn active_nodes(&self) -> usize {
        self.points.len()
    }

    pub fn solve(&self, kappa: f64) -> Result<BoundaryData> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be positive, got {kappa}")));
        }
        let traces: Vec<(C64, C64)> = self
            .grid
            .nodes
            .par_iter()
            .zip(self.grid.normals.par_iter())
            .map(|(x, nu)| {
                let (mut u, mut un) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (y, m) in self.points.iter().zip(&self.masses) {
                    let (d, rho) = separation(x, y)?;
                    let (phi, dphi) = kernel_pair(self.dim, kappa, rho)?;
                    u -= phi * m;
                    un -= dphi * m * (dot(&d, nu) / rho);
                }
                Ok((u, un))
            })
            .collect::<Result<_>>()?;
        let (dirichlet, neumann) = traces.into_iter().unzip();
        BoundaryData::new(kappa, self.grid.clone(), dirichlet, Some(neumann))
    }
}

/// One-shot `ForwardSolver::new(..)?.solve(kappa)`.
pub fn solve_forward(
    source: &SourceField,
    kappa: f64,
    boundary: &Arc<BoundaryGrid>,
    ball: &BallGrid,
) -> Result<BoundaryData> {
    ForwardSolver::new(source, boundary.clone(), ball)?.solve(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_d_kernel_phase() {
        let kappa = PI;
        let v = green_kernel(Dim::Three, kappa, &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        assert!((v - C64::new(-1.0 / (4.0 * PI), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn three_d_normal_derivative_closed_form() {
        let v = green_kernel_normal_deriv(Dim::Three, 2.0, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0; 3]).unwrap();
        let want = C64::from_polar(1.0, 2.0) * C64::new(-1.0, 2.0) / (4.0 * PI);
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn tangential_normal_gives_zero() {
        for dim in [Dim::Two, Dim::Three] {
            let v = green_kernel_normal_deriv(dim, 3.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.2, 0.0, 0.0]).unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn coincident_points_are_a_domain_error() {
        let p = [0.3, 0.1, 0.0];
        assert!(matches!(green_kernel(Dim::Two, 1.0, &p, &p), Err(Error::Domain(_))));
        assert!(matches!(green_kernel_normal_deriv(Dim::Three, 1.0, &p, &p, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_pair_agrees_with_separate_kernels() {
        for dim in [Dim::Two, Dim::Three] {
            let (x, y) = ([1.0, 0.2, 0.0], [0.1, -0.3, 0.0]);
            let rho = norm(&sub(&x, &y));
            let (phi, dphi) = kernel_pair(dim, 7.0, rho).unwrap();
            assert!((phi - green_kernel(dim, 7.0, &x, &y).unwrap()).norm() < 1e-15);
            assert!((dphi - radial_derivative(dim, 7.0, rho).unwrap()).norm() < 1e-14);
        }
    }
}
