//! Forward data, noisy observation, Fourier extraction and reconstruction for
//! one configured experiment.

use std::sync::Arc;

use issp_core::forward::{BoundaryData, ForwardSolver};
use issp_core::geometry::{frequency_rule, make_ball_grid, make_boundary_grid, BallGrid, BoundaryGrid, FreqGrid};
use issp_core::metrics::{dirichlet_difference, epsilon_functional, l2_error, l2_norm_on, StabilityBudget};
use issp_core::sources::SourceField;
use issp_core::spectral::{
    assemble_fourier_samples, fourier_data_from_boundary, lowpass_oracle, reconstruct, DirectionSet, FourierSamples,
    Reconstruction,
};
use issp_core::{Error, C64};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::dataset::Dataset;
use crate::error::{HarnessError, Result};
use crate::noise::{add_noise, NoiseSeed};

/// Immutable grids and source shared by every worker.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub source: SourceField,
    pub boundary: Arc<BoundaryGrid>,
    /// Volume quadrature for the forward integrals.
    pub ball: BallGrid,
    /// Grid on which reconstructions are evaluated and compared.
    pub target: BallGrid,
    /// The full simulated band; every sweep point uses a prefix of it.
    pub freq: FreqGrid,
    pub directions: DirectionSet,
}

/// Per-wavenumber `f̂(κ_j ω_l)` blocks over the whole band.
pub type FourierBlocks = Vec<Vec<C64>>;

/// Noise-free and noisy quantities at one band limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub epsilon: f64,
    pub l2_error: f64,
    pub rel_error: f64,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let source = config.source_field()?;
        Self::with_source(config, source)
    }

    /// Same grids and band as `config`, different source.
    pub fn with_source(config: ExperimentConfig, source: SourceField) -> Result<Self> {
        let c = &config;
        let boundary = Arc::new(make_boundary_grid(c.dim, c.radius, c.n_theta, c.n_phi)?);
        let r = source.support_radius;
        let ball = make_ball_grid(c.dim, r, c.ball_resolution)?;
        let target = make_ball_grid(c.dim, c.target_radius.unwrap_or(r), c.target_resolution)?;
        let freq = Self::band(c, c.k_max)?;
        let directions = DirectionSet::for_band(c.dim, c.k_max, r)?;
        Ok(Experiment { config, source, boundary, ball, target, freq, directions })
    }

    fn band(c: &ExperimentConfig, k: f64) -> Result<FreqGrid> {
        let steps = c.lattice_steps(k).ok_or_else(|| {
            HarnessError::Config(format!("{k} is not on the frequency lattice (step {})", c.freq_step))
        })?;
        let rule = frequency_rule(&c.freq_rule)?;
        // the origin rule has one node per step; the cutoff rule also stores κ_min
        let n = if rule.name() == "simpson-cutoff" { steps + 1 } else { steps };
        Ok(rule.build(c.kappa_min.or((rule.name() == "simpson-cutoff").then_some(c.freq_step)), k, n)?)
    }

    /// The frequency grid of band limit `k`, a prefix of the full band.
    pub fn freq_grid(&self, k: f64) -> Result<FreqGrid> {
        let g = Self::band(&self.config, k)?;
        let full = &self.freq.kappas;
        let consistent =
            g.len() <= full.len() && g.kappas.iter().zip(full).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs());
        if !consistent {
            return Err(HarnessError::Config(format!("band limit {k} does not share the simulated frequency lattice")));
        }
        Ok(g)
    }

    /// Clean traces (both from the volume integral) at every wavenumber.
    pub fn forward(&self) -> Result<Dataset> {
        let solver = ForwardSolver::new(&self.source, self.boundary.clone(), &self.ball)?;
        let blocks = self.freq.kappas.par_iter().map(|&k| solver.solve(k)).collect::<issp_core::Result<Vec<_>>>()?;
        Ok(Dataset { grid: self.boundary.clone(), blocks })
    }

    /// A stored dataset must describe this grid and band.
    pub fn check_dataset(&self, ds: &Dataset) -> Result<()> {
        if *ds.grid != *self.boundary {
            return Err(Error::State(format!(
                "dataset grid ({}D, R = {}, {:?}) does not match the configuration",
                ds.grid.dim,
                ds.grid.radius,
                ds.grid.counts()
            ))
            .into());
        }
        if ds.kappas() != self.freq.kappas {
            return Err(Error::State(format!(
                "dataset holds {} wavenumbers that differ from the configured band (K = {}, step {})",
                ds.blocks.len(),
                self.config.k_max,
                self.config.freq_step
            ))
            .into());
        }
        Ok(())
    }

    /// Noisy Dirichlet data with ℬ-synthesised Neumann traces. Wavenumber `j`
    /// draws from stream `j` of `seed`.
    pub fn observe(&self, clean: &[BoundaryData], delta: f64, seed: u64) -> Result<Vec<BoundaryData>> {
        let trunc = self.config.truncation.at();
        Ok(clean
            .par_iter()
            .enumerate()
            .map(|(j, d)| add_noise(d, delta, NoiseSeed { master: seed, stream: j as u64 }, trunc))
            .collect::<issp_core::Result<Vec<_>>>()?)
    }

    pub fn fourier_blocks(&self, observed: &[BoundaryData]) -> Result<FourierBlocks> {
        let dirs = &self.directions.directions;
        Ok(observed.par_iter().map(|d| fourier_data_from_boundary(d, dirs)).collect::<issp_core::Result<Vec<_>>>()?)
    }

    pub fn samples(&self, blocks: &FourierBlocks, k: f64) -> Result<FourierSamples> {
        let g = self.freq_grid(k)?;
        Ok(assemble_fourier_samples(&blocks[..g.len()], &g, &self.directions)?)
    }

    pub fn reconstruct(&self, samples: &FourierSamples) -> Result<Reconstruction> {
        Ok(reconstruct(samples, &self.target)?)
    }

    /// Measured `ε` between observed and clean data over `(0, k]`.
    pub fn epsilon(&self, clean: &[BoundaryData], observed: &[BoundaryData], k: f64) -> Result<f64> {
        let g = self.freq_grid(k)?;
        let diff = observed[..g.len()]
            .iter()
            .zip(clean)
            .map(|(a, b)| dirichlet_difference(a, b))
            .collect::<issp_core::Result<Vec<_>>>()?;
        Ok(epsilon_functional(&diff, &g, self.config.truncation.at())?)
    }

    pub fn source_norm(&self) -> f64 {
        self.target.integrate(|y| self.source.evaluate(y).norm_sqr()).sqrt()
    }

    /// Absolute and relative `L²` error of the reconstruction from `blocks` at `k`.
    pub fn error_at(&self, blocks: &FourierBlocks, k: f64) -> Result<(f64, f64)> {
        let rec = self.reconstruct(&self.samples(blocks, k)?)?;
        let err = l2_error(&rec, &self.source)?;
        Ok((err, err / l2_norm_on(&rec, &self.source)))
    }

    /// One noise realisation evaluated at every band limit in `ks`.
    pub fn realisation(&self, clean: &[BoundaryData], delta: f64, seed: u64, ks: &[f64]) -> Result<Vec<PointResult>> {
        let observed = self.observe(clean, delta, seed)?;
        let blocks = self.fourier_blocks(&observed)?;
        ks.iter()
            .map(|&k| {
                let (l2_error, rel_error) = self.error_at(&blocks, k)?;
                Ok(PointResult { epsilon: self.epsilon(clean, &observed, k)?, l2_error, rel_error })
            })
            .collect()
    }

    /// `‖f - f_K‖_{L²}` from the analytic spectrum.
    pub fn lowpass_error(&self, k: f64) -> f64 {
        lowpass_oracle(&self.source, k)
    }

    /// `M`: configured, or `‖f‖_{H^{n+1}}` measured on the forward grid.
    pub fn bound_m(&self) -> Result<f64> {
        match self.config.m {
            Some(m) => Ok(m),
            None => Ok(self.source.sobolev_norm(self.config.n + 1, &self.ball)?.value),
        }
    }

    /// `None` when `ε ≥ e^{-1}`, outside the estimate's standing assumption.
    pub fn budget(&self, epsilon: f64, k: f64, m: f64) -> Result<Option<StabilityBudget>> {
        if epsilon >= (-1.0f64).exp() {
            return Ok(None);
        }
        Ok(Some(StabilityBudget::new(epsilon, k, self.config.n, m, self.config.radius, self.config.dim)?))
    }
}
