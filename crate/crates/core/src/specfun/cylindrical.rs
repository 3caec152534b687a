//! Integer-order cylindrical Bessel functions of real positive argument.
//!
//! `J_n` comes from Miller's normalised backward recurrence, which also yields
//! the Neumann series for `Y_0` and `Y_1` in the same sweep. For `x ≥ 20` the
//! order-0/1 pair switches to the Hankel asymptotic expansion, whose smallest
//! term there is below `e^{-40}`. Higher orders of `Y_n` (and `H_n`) use the
//! upward recurrence, which is stable for the dominant solution; `J_n` never
//! does, since upward recurrence on the minimal solution loses all accuracy
//! once `n > x`.

use std::f64::consts::{FRAC_PI_4, PI};

use super::OrderCap;
use crate::{Error, Result, C64};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments at or above this use the asymptotic expansion for orders 0 and 1.
pub const ASYMPTOTIC_THRESHOLD: f64 = 20.0;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Neumann-series sums accumulated alongside the recurrence.
struct MillerSums {
    /// `Σ_{k≥1} (-1)^k J_{2k}/k`
    even_series: f64,
    /// `Σ_{k≥1} (-1)^k (J_{2k-1} - J_{2k+1})/k`
    odd_series: f64,
}

fn miller_start(nmax: usize, x: f64) -> usize {
    let top = (nmax as f64).max(x);
    let start = (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize;
    start + (start & 1)
}

/// Backward recurrence `J_{m-1} = (2m/x) J_m - J_{m+1}` normalised by
/// `J_0 + 2 Σ J_{2k} = 1`; fills `j` with `J_0 ..= J_{len-1}`. Writing into a
/// caller buffer keeps the order-0/1 path free of allocation.
fn miller(x: f64, j: &mut [f64]) -> MillerSums {
    let nmax = j.len() - 1;
    let start = miller_start(nmax, x);
    let mut norm = 0.0;
    let mut even = 0.0;
    let mut odd = 0.0;

    let mut next = 0.0; // J_{m+1}
    let mut cur = 1.0; // J_m
    let two_over_x = 2.0 / x;
    let mut m = start;
    loop {
        if m <= nmax {
            j[m] = cur;
        }
        if m == 0 {
            norm += cur;
            break;
        }
        if m.is_multiple_of(2) {
            norm += 2.0 * cur;
            let k = (m / 2) as f64;
            let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            even += sign * cur / k;
        } else if m == 1 {
            odd -= cur;
        } else {
            let mf = m as f64;
            let sign = if m.div_ceil(2).is_multiple_of(2) { 1.0 } else { -1.0 };
            odd += sign * 4.0 * mf / (mf * mf - 1.0) * cur;
        }

        let prev = (m as f64 * two_over_x) * cur - next;
        next = cur;
        cur = prev;
        m -= 1;

        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            even *= RESCALE_BY;
            odd *= RESCALE_BY;
            for v in j.iter_mut().skip(m + 1) {
                *v *= RESCALE_BY;
            }
        }
    }

    let scale = 1.0 / norm;
    for v in j.iter_mut() {
        *v *= scale;
    }
    MillerSums { even_series: even * scale, odd_series: odd * scale }
}

/// `H_ν^{(1)}(x) ~ sqrt(2/(πx)) e^{i(x - νπ/2 - π/4)} Σ_k i^k a_k(ν) / x^k`
/// for `ν = 0, 1` in one pass; the series is cut at its smallest term.
fn hankel01_asymptotic(x: f64) -> (C64, C64) {
    // accumulate Σ i^k a_k by k mod 4 into real/imaginary parts
    let (mut s0, mut s1) = ([1.0, 0.0], [1.0, 0.0]);
    let (mut a0, mut a1) = (1.0f64, 1.0f64);
    let (mut live0, mut live1) = (true, true);
    let inv8x = 1.0 / (8.0 * x);
    for k in 1..80usize {
        let odd = (2 * k - 1) as f64;
        let (sign, part) = match k % 4 {
            1 => (1.0, 1),
            2 => (-1.0, 0),
            3 => (-1.0, 1),
            _ => (1.0, 0),
        };
        if live0 {
            let next = a0 * (-odd * odd) * inv8x / k as f64;
            if next.abs() > a0.abs() {
                live0 = false;
            } else {
                a0 = next;
                s0[part] += sign * a0;
                live0 = a0.abs() >= 1e-17;
            }
        }
        if live1 {
            let next = a1 * (4.0 - odd * odd) * inv8x / k as f64;
            if next.abs() > a1.abs() && k > 1 {
                live1 = false;
            } else {
                a1 = next;
                s1[part] += sign * a1;
                live1 = a1.abs() >= 1e-17 || k == 1;
            }
        }
        if !live0 && !live1 {
            break;
        }
    }
    let e = C64::from_polar((2.0 / (PI * x)).sqrt(), x - FRAC_PI_4);
    let h0 = e * C64::new(s0[0], s0[1]);
    // e^{-iπ/2} = -i
    let h1 = e * C64::new(0.0, -1.0) * C64::new(s1[0], s1[1]);
    (h0, h1)
}

/// `[J_0, J_1, Y_0, Y_1]` at `x > 0`.
pub fn bessel_jy01(x: f64) -> Result<[f64; 4]> {
    check_arg(x)?;
    if x >= ASYMPTOTIC_THRESHOLD {
        let (h0, h1) = hankel01_asymptotic(x);
        return Ok([h0.re, h1.re, h0.im, h1.im]);
    }
    let mut j = [0.0; 2];
    let mil = miller(x, &mut j);
    let (j0, j1) = (j[0], j[1]);
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = 2.0 / PI * (log_term * j0 - 2.0 * mil.even_series);
    let y1 = 2.0 / PI * (-j0 / x + log_term * j1 + mil.odd_series);
    Ok([j0, j1, y0, y1])
}

/// `(H_0^{(1)}(x), H_1^{(1)}(x))`, the pair needed by the 2D Green's kernel.
pub fn hankel01(x: f64) -> Result<(C64, C64)> {
    let [j0, j1, y0, y1] = bessel_jy01(x)?;
    Ok((C64::new(j0, y0), C64::new(j1, y1)))
}

/// `J_0(x) ..= J_nmax(x)`; defined for `x ≥ 0`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    if x == 0.0 {
        let mut j = vec![0.0; nmax + 1];
        j[0] = 1.0;
        return Ok(j);
    }
    check_arg(x)?;
    let mut j = vec![0.0; nmax.max(1) + 1];
    miller(x, &mut j);
    j.truncate(nmax + 1);
    Ok(j)
}

pub fn bessel_j(order: usize, x: f64) -> Result<f64> {
    OrderCap::default().check("Bessel order", order)?;
    Ok(bessel_j_seq(order, x)?[order])
}

/// `Y_0(x) ..= Y_nmax(x)` by upward recurrence.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    let [_, _, y0, y1] = bessel_jy01(x)?;
    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    if nmax >= 1 {
        y.push(y1);
    }
    for n in 1..nmax {
        let next = (2.0 * n as f64 / x) * y[n] - y[n - 1];
        if !next.is_finite() {
            return Err(Error::NonFinite(format!("Y_{}({x}) overflows", n + 1)));
        }
        y.push(next);
    }
    Ok(y)
}

pub fn bessel_y(order: usize, x: f64) -> Result<f64> {
    OrderCap::default().check("Bessel order", order)?;
    Ok(bessel_y_seq(order, x)?[order])
}

/// `H_0^{(1)}(x) ..= H_nmax^{(1)}(x)`.
pub fn hankel1_seq(nmax: usize, x: f64, cap: OrderCap) -> Result<Vec<C64>> {
    cap.check("Hankel order", nmax)?;
    let j = bessel_j_seq(nmax, x)?;
    let y = bessel_y_seq(nmax, x)?;
    Ok(j.into_iter().zip(y).map(|(re, im)| C64::new(re, im)).collect())
}

/// Hankel function of the first kind, `H_n^{(1)}(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(order: usize, x: f64) -> Result<C64> {
    hankel1_capped(order, x, OrderCap::default())
}

pub fn hankel1_capped(order: usize, x: f64, cap: OrderCap) -> Result<C64> {
    cap.check("Hankel order", order)?;
    if order <= 1 {
        let (h0, h1) = hankel01(x)?;
        return Ok(if order == 0 { h0 } else { h1 });
    }
    Ok(hankel1_seq(order, x, cap)?[order])
}

/// `H_n'(x) / H_n(x)` for `n = 0 ..= nmax`.
///
/// Runs the recurrence on the ratios `t_k = H_k / H_{k-1}`,
/// `t_{k+1} = 2k/x - 1/t_k`, so nothing overflows even where `|Y_n|` does;
/// then `H_n'/H_n = 1/t_n - n/x`.
pub fn hankel1_dtn_ratios(nmax: usize, x: f64, cap: OrderCap) -> Result<Vec<C64>> {
    cap.check("Hankel order", nmax)?;
    let (h0, h1) = hankel01(x)?;
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(-h1 / h0);
    let mut t = h1 / h0;
    for n in 1..=nmax {
        if n > 1 {
            t = (2.0 * (n - 1) as f64 / x) - t.inv();
        }
        out.push(t.inv() - n as f64 / x);
    }
    Ok(out)
}

pub fn hankel1_dtn_ratio(order: usize, x: f64) -> Result<C64> {
    Ok(hankel1_dtn_ratios(order, x, OrderCap::default())?[order])
}
