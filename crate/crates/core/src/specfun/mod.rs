//! Special functions for the Green's kernels and DtN series.

mod cylindrical;
mod harmonics;
mod spherical;

pub use cylindrical::{
    bessel_j, bessel_j_seq, bessel_jy01, bessel_y, bessel_y_seq, hankel01, hankel1, hankel1_capped, hankel1_dtn_ratio,
    hankel1_dtn_ratios, hankel1_seq, ASYMPTOTIC_THRESHOLD,
};
pub use harmonics::{normalized_legendre_column, sph_harmonic, sph_harmonic_capped};
pub use spherical::{sph_bessel_j_seq, sph_hankel1, sph_hankel1_dtn_ratio, sph_hankel1_dtn_ratios, sph_hankel1_seq};

use crate::{Error, Result};

pub const DEFAULT_ORDER_MAX: usize = 256;

/// Upper bound on Bessel/Hankel orders and harmonic degrees. Requests above it
/// fail with [`Error::Cap`] instead of silently degrading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderCap(pub usize);

impl Default for OrderCap {
    fn default() -> Self {
        OrderCap(DEFAULT_ORDER_MAX)
    }
}

impl OrderCap {
    pub fn check(self, what: &'static str, value: usize) -> Result<()> {
        if value > self.0 {
            Err(Error::Cap { what, value, max: self.0 })
        } else {
            Ok(())
        }
    }
}
