//! Spherical Bessel and Hankel functions of integer order.

use super::OrderCap;
use crate::{Error, Result, C64};

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("spherical Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

fn h0_h1(x: f64) -> (C64, C64) {
    let e = C64::from_polar(1.0, x);
    let h0 = C64::new(0.0, -1.0) * e / x;
    let h1 = -e * C64::new(x, 1.0) / (x * x);
    (h0, h1)
}

/// `h_0^{(1)} ..= h_nmax^{(1)}` from the closed forms of orders 0 and 1 and
/// the upward recurrence `h_{n+1} = (2n+1)/x h_n - h_{n-1}`.
pub fn sph_hankel1_seq(nmax: usize, x: f64, cap: OrderCap) -> Result<Vec<C64>> {
    cap.check("spherical Hankel order", nmax)?;
    check_arg(x)?;
    let (h0, h1) = h0_h1(x);
    let mut h = vec![h0];
    if nmax >= 1 {
        h.push(h1);
    }
    for n in 1..nmax {
        let next = h[n] * ((2 * n + 1) as f64 / x) - h[n - 1];
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::NonFinite(format!("h_{}({x}) overflows", n + 1)));
        }
        h.push(next);
    }
    Ok(h)
}

pub fn sph_hankel1(order: usize, x: f64) -> Result<C64> {
    Ok(sph_hankel1_seq(order, x, OrderCap::default())?[order])
}

/// `h_n'(x) / h_n(x)` for `n = 0 ..= nmax` via `t_{k+1} = (2k+1)/x - 1/t_k`
/// on `t_k = h_k/h_{k-1}`, and `h_n' = h_{n-1} - (n+1)/x h_n`.
pub fn sph_hankel1_dtn_ratios(nmax: usize, x: f64, cap: OrderCap) -> Result<Vec<C64>> {
    cap.check("spherical Hankel order", nmax)?;
    check_arg(x)?;
    let (h0, h1) = h0_h1(x);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(-h1 / h0);
    let mut t = h1 / h0;
    for n in 1..=nmax {
        if n > 1 {
            t = ((2 * n - 1) as f64 / x) - t.inv();
        }
        out.push(t.inv() - (n + 1) as f64 / x);
    }
    Ok(out)
}

pub fn sph_hankel1_dtn_ratio(order: usize, x: f64) -> Result<C64> {
    Ok(sph_hankel1_dtn_ratios(order, x, OrderCap::default())?[order])
}

/// `j_0(x) ..= j_nmax(x)` by normalised backward recurrence; `x ≥ 0`.
pub fn sph_bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    if x == 0.0 {
        let mut j = vec![0.0; nmax + 1];
        j[0] = 1.0;
        return Ok(j);
    }
    check_arg(x)?;
    let top = (nmax as f64).max(x);
    let start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    let mut j = vec![0.0; nmax.max(1) + 1];
    let mut next = 0.0;
    let mut cur = 1e-300_f64.max(f64::MIN_POSITIVE);
    let mut m = start;
    loop {
        if m < j.len() {
            j[m] = cur;
        }
        if m == 0 {
            break;
        }
        let prev = ((2 * m + 1) as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        m -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            for v in j.iter_mut().skip(m + 1) {
                *v *= 1e-250;
            }
        }
    }
    let (s, c) = x.sin_cos();
    let j0 = if x < 1e-4 { 1.0 - x * x / 6.0 } else { s / x };
    let j1 = if x < 1e-4 { x / 3.0 } else { s / (x * x) - c / x };
    let scale = if j0.abs() >= j1.abs() { j0 / j[0] } else { j1 / j[1] };
    j.truncate(nmax + 1);
    for v in &mut j {
        *v *= scale;
    }
    Ok(j)
}
