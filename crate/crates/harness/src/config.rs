//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Every key must be one of [`KEYS`], each at most once per source. Command
//! line overrides replace file values key by key.

#![allow(clippy::unit_arg)] // setters are `|c, v| Ok(c.field = parse(v)?)`

use std::collections::BTreeMap;
use std::path::PathBuf;

use issp_core::dtn::{default_truncation, max_truncation};
use issp_core::geometry::{frequency_rule, make_boundary_grid};
use issp_core::sources::{SourceField, SourceSpec, PRESETS};
use issp_core::Dim;

use crate::error::{HarnessError, Result};

/// How many DtN modes to keep at each wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `⌈κR⌉ + 32`.
    Auto,
    Fixed(usize),
}

impl Truncation {
    pub fn at(self) -> Option<usize> {
        match self {
            Truncation::Auto => None,
            Truncation::Fixed(n) => Some(n),
        }
    }

    fn resolve(self, kappa: f64, radius: f64) -> usize {
        self.at().unwrap_or_else(|| default_truncation(kappa, radius))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: Dim,
    /// Observation radius `R`.
    pub radius: f64,
    pub source_name: String,
    pub source: SourceSpec,
    /// Top of the simulated band.
    pub k_max: f64,
    pub freq_step: f64,
    pub freq_rule: String,
    pub kappa_min: Option<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Cells across the diameter of the forward quadrature grid.
    pub ball_resolution: usize,
    /// Cells across the diameter of the reconstruction grid.
    pub target_resolution: usize,
    /// Radius of the reconstruction grid; `None` uses the support radius.
    pub target_radius: Option<f64>,
    pub truncation: Truncation,
    pub noise_delta: f64,
    pub seed: u64,
    /// Noise realisations averaged per sweep point.
    pub noise_seeds: usize,
    pub sweep_k: Vec<f64>,
    pub sweep_delta: Vec<f64>,
    /// Regularity index `n` of the admissible class.
    pub n: usize,
    /// A priori bound `M`; `None` measures `‖f‖_{H^{n+1}}`.
    pub m: Option<f64>,
    pub lemma_sources: Vec<String>,
    pub lemma_s: Vec<f64>,
    pub lemma_ladder: Vec<f64>,
    pub out: PathBuf,
    pub dataset: Option<PathBuf>,
    pub jobs: Option<usize>,
}

type Setter = fn(&mut ExperimentConfig, &str) -> std::result::Result<(), String>;

pub struct Key {
    pub name: &'static str,
    pub help: &'static str,
    set: Setter,
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse {v:?}"))
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(num).collect()
}

fn words(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn auto_or<T: std::str::FromStr>(v: &str) -> std::result::Result<Option<T>, String> {
    if v == "auto" {
        Ok(None)
    } else {
        num(v).map(Some)
    }
}

/// Applied in this order, so `source` is set before its overrides.
pub const KEYS: &[Key] = &[
    Key {
        name: "dim",
        help: "spatial dimension, 2 or 3",
        set: |c, v| {
            c.dim = Dim::from_usize(num(v)?).map_err(|e| e.to_string())?;
            Ok(())
        },
    },
    Key { name: "R", help: "observation radius", set: |c, v| Ok(c.radius = num(v)?) },
    Key {
        name: "source",
        help: "source preset: gaussian, gaussian_pair, bump, bessel",
        set: |c, v| {
            c.source = SourceSpec::preset(v).map_err(|e| e.to_string())?;
            c.source_name = v.to_string();
            Ok(())
        },
    },
    Key { name: "source.sigma", help: "profile width", set: |c, v| Ok(c.source.params.sigma = Some(num(v)?)) },
    Key { name: "source.power", help: "window power", set: |c, v| Ok(c.source.params.power = Some(num(v)?)) },
    Key {
        name: "source.wavenumber",
        help: "Bessel mode wavenumber",
        set: |c, v| Ok(c.source.params.wavenumber = Some(num(v)?)),
    },
    Key { name: "r", help: "support radius of the source", set: |c, v| Ok(c.source.support_radius = num(v)?) },
    Key { name: "K", help: "top of the simulated frequency band", set: |c, v| Ok(c.k_max = num(v)?) },
    Key { name: "freq.step", help: "frequency lattice step", set: |c, v| Ok(c.freq_step = num(v)?) },
    Key {
        name: "freq.rule",
        help: "frequency rule: simpson-origin or simpson-cutoff",
        set: |c, v| Ok(c.freq_rule = v.to_string()),
    },
    Key { name: "kappa_min", help: "lower cutoff (simpson-cutoff only)", set: |c, v| Ok(c.kappa_min = auto_or(v)?) },
    Key {
        name: "boundary.n_theta",
        help: "boundary nodes (circle) or polar rings",
        set: |c, v| Ok(c.n_theta = num(v)?),
    },
    Key { name: "boundary.n_phi", help: "azimuths per ring (3D)", set: |c, v| Ok(c.n_phi = num(v)?) },
    Key {
        name: "ball.resolution",
        help: "forward volume grid cells per diameter",
        set: |c, v| Ok(c.ball_resolution = num(v)?),
    },
    Key {
        name: "target.resolution",
        help: "reconstruction grid cells per diameter",
        set: |c, v| Ok(c.target_resolution = num(v)?),
    },
    Key {
        name: "target.radius",
        help: "reconstruction grid radius, or auto for the support radius",
        set: |c, v| Ok(c.target_radius = auto_or(v)?),
    },
    Key {
        name: "dtn.truncation",
        help: "auto (⌈κR⌉+32) or a fixed mode count",
        set: |c, v| {
            c.truncation = auto_or(v)?.map_or(Truncation::Auto, Truncation::Fixed);
            Ok(())
        },
    },
    Key { name: "noise.delta", help: "relative noise level", set: |c, v| Ok(c.noise_delta = num(v)?) },
    Key { name: "noise.seeds", help: "noise realisations per sweep point", set: |c, v| Ok(c.noise_seeds = num(v)?) },
    Key { name: "seed", help: "master seed", set: |c, v| Ok(c.seed = num(v)?) },
    Key { name: "sweep.k", help: "comma-separated K ladder", set: |c, v| Ok(c.sweep_k = list(v)?) },
    Key { name: "sweep.delta", help: "comma-separated noise ladder", set: |c, v| Ok(c.sweep_delta = list(v)?) },
    Key { name: "n", help: "regularity index (default d+1)", set: |c, v| Ok(c.n = num(v)?) },
    Key { name: "M", help: "a priori bound, or auto to measure it", set: |c, v| Ok(c.m = auto_or(v)?) },
    Key {
        name: "lemmas.sources",
        help: "presets to check, or `config` for the configured source",
        set: |c, v| Ok(c.lemma_sources = words(v)),
    },
    Key { name: "lemmas.s", help: "real s values for the energy bounds", set: |c, v| Ok(c.lemma_s = list(v)?) },
    Key { name: "lemmas.ladder", help: "s ladder for the tail slope fit", set: |c, v| Ok(c.lemma_ladder = list(v)?) },
    Key { name: "out", help: "output directory", set: |c, v| Ok(c.out = PathBuf::from(v)) },
    Key { name: "dataset", help: "forward dataset path", set: |c, v| Ok(c.dataset = Some(PathBuf::from(v))) },
    Key { name: "jobs", help: "worker threads", set: |c, v| Ok(c.jobs = Some(num(v)?)) },
];

/// Parses `key = value` lines; duplicates and malformed lines are errors.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`, got {raw:?}", no + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if map.insert(k.clone(), v).is_some() {
            return Err(HarnessError::Config(format!("line {}: duplicate key {k:?}", no + 1)));
        }
    }
    Ok(map)
}

/// Splits a `key=value` command line override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::Config(format!("override {s:?} is not `key=value`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl ExperimentConfig {
    fn defaults(dim: Dim) -> Self {
        let three = dim == Dim::Three;
        ExperimentConfig {
            dim,
            radius: 1.0,
            source_name: "gaussian".into(),
            source: SourceSpec::preset("gaussian").expect("built-in preset"),
            k_max: if three { 6.0 } else { 16.0 },
            freq_step: 0.125,
            freq_rule: "simpson-origin".into(),
            kappa_min: None,
            n_theta: if three { 40 } else { 256 },
            n_phi: if three { 80 } else { 0 },
            ball_resolution: if three { 32 } else { 64 },
            target_resolution: if three { 24 } else { 48 },
            target_radius: None,
            truncation: Truncation::Auto,
            noise_delta: 0.0,
            seed: 1,
            noise_seeds: 1,
            sweep_k: Vec::new(),
            sweep_delta: Vec::new(),
            n: dim.as_usize() + 1,
            m: None,
            lemma_sources: PRESETS.iter().map(|s| s.to_string()).collect(),
            lemma_s: vec![1.0, 2.0, 4.0],
            lemma_ladder: if three { Vec::new() } else { vec![4.0, 8.0, 16.0, 32.0] },
            out: PathBuf::from("out"),
            dataset: None,
            jobs: None,
        }
    }

    /// Builds a validated config from key/value pairs. Dimension-dependent
    /// defaults follow the `dim` key.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(bad) = pairs.keys().find(|k| !KEYS.iter().any(|key| key.name == k.as_str())) {
            let known: Vec<_> = KEYS.iter().map(|k| k.name).collect();
            return Err(HarnessError::Config(format!("unknown key {bad:?}; known keys: {}", known.join(", "))));
        }
        let dim = match pairs.get("dim") {
            Some(v) => Dim::from_usize(num(v).map_err(|e| HarnessError::Config(format!("dim: {e}")))?)
                .map_err(|e| HarnessError::Config(e.to_string()))?,
            None => Dim::Two,
        };
        let mut cfg = Self::defaults(dim);
        for key in KEYS {
            if let Some(v) = pairs.get(key.name) {
                (key.set)(&mut cfg, v).map_err(|e| HarnessError::Config(format!("{}: {e}", key.name)))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn source_field(&self) -> Result<SourceField> {
        Ok(self.source.build(self.dim)?)
    }

    /// Number of lattice steps from the lower end of the band to `k`, if `k`
    /// is on the lattice.
    pub fn lattice_steps(&self, k: f64) -> Option<usize> {
        let lower = if self.freq_rule == "simpson-cutoff" { self.kappa_min.unwrap_or(self.freq_step) } else { 0.0 };
        let t = (k - lower) / self.freq_step;
        let j = t.round();
        (j >= 1.0 && (t - j).abs() < 1e-9 * t.max(1.0)).then_some(j as usize)
    }

    /// Lemma abscissae are only needed by the lemma checks, so they are
    /// validated there rather than for every command.
    pub fn validate_lemma_abscissae(&self) -> Result<()> {
        let on_lattice = |s: f64| self.lattice_steps(s).is_some();
        if let Some(s) = self.lemma_s.iter().find(|&&s| s > self.k_max * (1.0 + 1e-12) || !on_lattice(s)) {
            return Err(HarnessError::Config(format!(
                "lemmas.s entry {s} must lie on the frequency lattice up to K = {}",
                self.k_max
            )));
        }
        // the tail integral runs up to K, so the ladder must stop short of it
        if let Some(s) = self.lemma_ladder.iter().find(|&&s| s >= self.k_max * (1.0 - 1e-12) || !on_lattice(s)) {
            return Err(HarnessError::Config(format!(
                "lemmas.ladder entry {s} must lie on the frequency lattice strictly below K = {}",
                self.k_max
            )));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let d = self.dim.as_usize();
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("R must be positive, got {}", self.radius));
        }
        let source = self.source_field()?;
        source
            .check_observation_radius(self.radius)
            .map_err(|e| HarnessError::Config(format!("r < R with margin violated: {e}")))?;
        if !(self.k_max > 1.0 && self.k_max.is_finite()) {
            return bad(format!("K > 1 required, got K = {}", self.k_max));
        }
        if self.n < d {
            return bad(format!("n ≥ d required, got n = {} for d = {d}", self.n));
        }
        if !(self.noise_delta >= 0.0 && self.noise_delta.is_finite()) {
            return bad(format!("noise.delta ≥ 0 required, got {}", self.noise_delta));
        }
        if let Some(x) = self.sweep_delta.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return bad(format!("sweep.delta entries must be ≥ 0, got {x}"));
        }
        if self.noise_seeds == 0 {
            return bad("noise.seeds must be at least 1".into());
        }
        if self.target_radius.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return bad("target.radius must be positive".into());
        }
        if self.m.is_some_and(|m| !(m > 0.0)) {
            return bad("M must be positive".into());
        }
        if !(self.freq_step > 0.0) {
            return bad(format!("freq.step must be positive, got {}", self.freq_step));
        }
        frequency_rule(&self.freq_rule)?;
        if self.freq_rule == "simpson-origin" && self.kappa_min.is_some() {
            return bad("kappa_min applies to simpson-cutoff only; the lattice starts at freq.step".into());
        }
        if self.lattice_steps(self.k_max).is_none() {
            return bad(format!("K = {} is not on the frequency lattice (step {})", self.k_max, self.freq_step));
        }
        for &k in &self.sweep_k {
            if k > self.k_max * (1.0 + 1e-12) || !(k > 1.0) || self.lattice_steps(k).is_none() {
                return bad(format!(
                    "sweep.k entry {k} must satisfy 1 < k ≤ K = {} and lie on the frequency lattice",
                    self.k_max
                ));
            }
        }
        for name in &self.lemma_sources {
            if name != "config" && !PRESETS.contains(&name.as_str()) {
                return bad(format!("lemmas.sources: unknown preset {name:?}"));
            }
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        let grid = make_boundary_grid(self.dim, self.radius, self.n_theta, self.n_phi)?;
        let need = self.truncation.resolve(self.k_max, self.radius);
        let cap = max_truncation(&grid);
        if need > cap {
            return bad(format!(
                "DtN truncation {need} at K = {} exceeds what the {}×{} boundary grid resolves ({cap})",
                self.k_max, self.n_theta, self.n_phi
            ));
        }
        Ok(())
    }

    /// Forward dataset location.
    pub fn dataset_path(&self) -> PathBuf {
        self.dataset.clone().unwrap_or_else(|| self.out.join("dataset.issp"))
    }
}
