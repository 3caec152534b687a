//! Test-only reference implementations. Nothing here calls into the routes
//! used by the library for the same quantity.
#![allow(dead_code)]

use issp_core::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn harmonic(m: usize) -> f64 {
    let mut acc = Neumaier::default();
    for j in 1..=m {
        acc.add(1.0 / j as f64);
    }
    acc.value()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Power series for `J_n(x)`.
pub fn series_j(n: usize, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powi(n as i32) / factorial(n);
    let mut acc = Neumaier::default();
    for k in 0..400 {
        acc.add(term);
        term *= q / ((k + 1) as f64 * (n + k + 1) as f64);
        if term.abs() < 1e-300 || (k > 10 && term.abs() < 1e-22 * acc.value().abs()) {
            break;
        }
    }
    acc.value()
}

/// Power series for `Y_n(x)` (finite part, logarithmic part, digamma series).
pub fn series_y(n: usize, x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let h = 0.5 * x;
    let q = 0.25 * x * x;

    let mut finite = Neumaier::default();
    if n > 0 {
        let mut c = factorial(n - 1);
        for k in 0..n {
            finite.add(c);
            if k + 1 < n {
                c *= q / ((k + 1) as f64 * (n - k - 1) as f64);
            }
        }
    }
    let part_a = -finite.value() / (pi * h.powi(n as i32));
    let part_b = 2.0 / pi * h.ln() * series_j(n, x);

    let mut acc = Neumaier::default();
    let mut term = 1.0 / factorial(n);
    for k in 0..400 {
        let psi = -2.0 * EULER_GAMMA + harmonic(k) + harmonic(n + k);
        acc.add(psi * term);
        term *= -q / ((k + 1) as f64 * (n + k + 1) as f64);
        if term.abs() < 1e-300 || (k > 10 && (psi * term).abs() < 1e-22 * acc.value().abs()) {
            break;
        }
    }
    let part_c = -h.powi(n as i32) / pi * acc.value();
    part_a + part_b + part_c
}

pub fn series_hankel(n: usize, x: f64) -> C64 {
    C64::new(series_j(n, x), series_y(n, x))
}

/// `H_n'(x)` from the three-term identity on oracle values.
pub fn series_hankel_deriv(n: usize, x: f64) -> C64 {
    if n == 0 {
        -series_hankel(1, x)
    } else {
        (series_hankel(n - 1, x) - series_hankel(n + 1, x)) * 0.5
    }
}

/// Closed-form spherical Hankel function
/// `h_n(x) = (-i)^{n+1} e^{ix}/x Σ_k i^k (n+k)!/(k!(n-k)!(2x)^k)`.
pub fn closed_sph_hankel(n: usize, x: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..=n {
        let coeff = factorial(n + k) / (factorial(k) * factorial(n - k) * (2.0 * x).powi(k as i32));
        sum += i.powu(k as u32) * coeff;
    }
    (-i).powu(n as u32 + 1) * C64::from_polar(1.0 / x, x) * sum
}

/// Relative distance `|a - b| / |b|`.
pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}
