//! Orthonormal complex spherical harmonics with the Condon–Shortley phase:
//! `Y_n^m(θ, φ) = P̄_n^m(cos θ) e^{imφ}` and `∫_{S²} |Y_n^m|² dΩ = 1`.

use super::OrderCap;
use crate::{Error, Result, C64};

/// `P̄_n^m(t)` for `n = m ..= nmax` (index `n - m`), normalised so that
/// `P̄_n^m(cos θ) e^{imφ}` is orthonormal on the unit sphere.
pub fn normalized_legendre_column(m: usize, nmax: usize, t: f64) -> Vec<f64> {
    if nmax < m {
        return Vec::new();
    }
    let sin_theta = (1.0 - t * t).max(0.0).sqrt();
    let mut pmm = (0.25 / std::f64::consts::PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sin_theta;
    }
    let mut col = Vec::with_capacity(nmax - m + 1);
    col.push(pmm);
    if nmax == m {
        return col;
    }
    col.push(t * ((2 * m + 3) as f64).sqrt() * pmm);
    let mf = m as f64;
    for n in (m + 2)..=nmax {
        let nf = n as f64;
        let denom = (nf - mf) * (nf + mf);
        let a = ((2.0 * nf + 1.0) * (2.0 * nf - 1.0) / denom).sqrt();
        let b = ((2.0 * nf + 1.0) * (nf - mf - 1.0) * (nf + mf - 1.0) / ((2.0 * nf - 3.0) * denom)).sqrt();
        let next = a * t * col[n - m - 1] - b * col[n - m - 2];
        col.push(next);
    }
    col
}

/// Orthonormal spherical harmonic `Y_n^m(θ, φ)`, `|m| ≤ n`.
pub fn sph_harmonic(degree: usize, order: i64, theta: f64, phi: f64) -> Result<C64> {
    sph_harmonic_capped(degree, order, theta, phi, OrderCap::default())
}

pub fn sph_harmonic_capped(degree: usize, order: i64, theta: f64, phi: f64, cap: OrderCap) -> Result<C64> {
    cap.check("spherical harmonic degree", degree)?;
    let m = order.unsigned_abs() as usize;
    if m > degree {
        return Err(Error::Domain(format!("|m| = {m} exceeds degree n = {degree}")));
    }
    let p = normalized_legendre_column(m, degree, theta.cos())[degree - m];
    let y = C64::from_polar(p, m as f64 * phi);
    if order < 0 {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(y.conj() * sign)
    } else {
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn y00_is_constant() {
        for (t, p) in [(0.1, 0.2), (1.3, 4.0), (3.0, 6.0)] {
            let y = sph_harmonic(0, 0, t, p).unwrap();
            assert!((y.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y.im == 0.0);
        }
    }

    #[test]
    fn y10_closed_form() {
        let y = sph_harmonic(1, 0, PI / 3.0, 0.7).unwrap();
        assert!((y.re - (3.0 / (4.0 * PI)).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn y11_has_condon_shortley_sign() {
        // Y_1^1 = -sqrt(3/8π) sin θ e^{iφ}
        let (t, p) = (0.9, 0.4);
        let y = sph_harmonic(1, 1, t, p).unwrap();
        let expect = C64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
        assert!((y - expect).norm() < 1e-15);
        let ym = sph_harmonic(1, -1, t, p).unwrap();
        assert!((ym + expect.conj()).norm() < 1e-15);
    }

    #[test]
    fn order_above_degree_is_a_domain_error() {
        assert!(matches!(sph_harmonic(2, 3, 0.1, 0.1), Err(Error::Domain(_))));
        assert!(matches!(sph_harmonic(2, -3, 0.1, 0.1), Err(Error::Domain(_))));
    }
}
