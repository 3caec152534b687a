//! Numerical checks of the energy inequalities behind the stability estimate.

use std::f64::consts::PI;

use issp_core::metrics::{energy_bound, mu, plancherel_constant, tail_slope_fit, EnergyProfile};
use issp_core::sources::SourceSpec;
use issp_core::spectral::{l2_norm_from_spectrum, lowpass_oracle};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::pipeline::Experiment;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub source: String,
    /// `energy-bound`, `plancherel`, `tail-decay` or `mu`.
    pub lemma: &'static str,
    pub quantity: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub note: String,
}

impl LemmaCheck {
    /// `bound / measured` for upper bounds; `bound - measured` for slopes and
    /// absolute deviation for exact values.
    pub fn margin(&self) -> f64 {
        match self.lemma {
            "tail-decay" => self.bound - self.measured,
            "mu" => (self.measured - self.bound).abs(),
            _ => self.bound / self.measured,
        }
    }
}

fn upper(source: &str, lemma: &'static str, quantity: String, measured: f64, bound: f64, strict: bool) -> LemmaCheck {
    let pass = if strict { measured < bound } else { measured <= bound };
    LemmaCheck { source: source.into(), lemma, quantity, measured, bound, pass, note: String::new() }
}

/// All checks for one source on the configured grids and band.
pub fn check_source(cfg: &ExperimentConfig, name: &str) -> Result<Vec<LemmaCheck>> {
    let mut cfg = cfg.clone();
    if name != "config" {
        cfg.source = SourceSpec::preset(name)?;
        cfg.source_name = name.to_string();
    }
    let exp = Experiment::new(cfg)?;
    let (cfg, source) = (&exp.config, &exp.source);
    let data = exp.forward()?.blocks;
    let energy = EnergyProfile::from_traces(&data, &exp.freq)?;
    let h1 = source.sobolev_norm(1, &exp.ball)?;
    let (l2_sq, h1_sq) = (h1.by_order[0], h1.value * h1.value);
    let mut out = Vec::new();

    for &s in &cfg.lemma_s {
        let (i1, i2) = energy.i1_i2(s)?;
        let (b1, b2) = energy_bound(cfg.dim, s, cfg.radius, l2_sq, h1_sq);
        out.push(upper(name, "energy-bound", format!("I1(s={s})"), i1, b1, true));
        out.push(upper(name, "energy-bound", format!("I2(s={s})"), i2, b2, true));
    }

    // band-limited form: ‖f_K‖² ≤ C (I₁ + I₂)(K)
    let k = cfg.k_max;
    let (i1, i2) = energy.i1_i2(k)?;
    let full = l2_norm_from_spectrum(source).powi(2);
    let lowpass_sq = full - lowpass_oracle(source, k).powi(2);
    let c = plancherel_constant(cfg.dim, cfg.radius);
    let mut pl = upper(name, "plancherel", format!("|f_K|^2 <= C (I1+I2)(K={k})"), lowpass_sq, c * (i1 + i2), false);
    pl.note = format!("C = {c:.6e}, fitted C = {:.6e}", lowpass_sq / (i1 + i2));
    out.push(pl);

    if !cfg.lemma_ladder.is_empty() {
        let tails = cfg.lemma_ladder.iter().map(|&s| energy.tail_integral(s)).collect::<issp_core::Result<Vec<_>>>()?;
        let d = cfg.dim.as_usize();
        let rate = (2 * cfg.n - 2 * d + 1) as f64;
        let slope = tail_slope_fit(&cfg.lemma_ladder, &tails)?;
        let mut t = upper(
            name,
            "tail-decay",
            format!("slope over s in {:?}, n = {}", cfg.lemma_ladder, cfg.n),
            slope,
            -rate + 0.5,
            false,
        );
        t.note = format!("s_max = {}", energy.s_max());
        out.push(t);
    }
    Ok(out)
}

/// The two branches of `μ` against their closed forms, to 1e-14.
pub fn check_mu(k: f64) -> Result<Vec<LemmaCheck>> {
    let cases = [(1.1, 0.5), (1.3, 1.0 / (PI * (1.3f64.powi(4) - 1.0).sqrt()))];
    cases
        .iter()
        .map(|&(t, want)| {
            let got = mu(t * k, k)?;
            Ok(LemmaCheck {
                source: "-".into(),
                lemma: "mu",
                quantity: format!("mu(s = {t} K)"),
                measured: got,
                bound: want,
                pass: (got - want).abs() <= 1e-14,
                note: String::new(),
            })
        })
        .collect()
}

pub fn verify(cfg: &ExperimentConfig) -> Result<Vec<LemmaCheck>> {
    cfg.validate_lemma_abscissae()?;
    let mut all = check_mu(cfg.k_max)?;
    for name in &cfg.lemma_sources {
        all.extend(check_source(cfg, name)?);
    }
    Ok(all)
}
