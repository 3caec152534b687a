//! Subcommands, registered by name and dispatched through [`Command`].

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::hash::{Hash, Hasher};
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::time::Instant;

use issp_core::metrics::{l2_error, l2_norm_on};
use issp_core::spectral::{l2_norm_from_spectrum, read_fourier_samples, write_fourier_samples, FourierSamples};

use crate::dataset::Dataset;
use crate::error::{HarnessError, Result};
use crate::lemmas::verify;
use crate::pipeline::{Experiment, PointResult};
use crate::report::{plot_script, write_records, write_text, ExperimentRecord};

/// Everything a command needs besides its own logic.
pub struct RunContext {
    pub experiment: Experiment,
    pub emit_plot_script: bool,
}

/// Files written and a short human-readable account.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

pub trait Command: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, ctx: &RunContext) -> Result<Outcome>;
}

struct Forward;
struct Reconstruct;
struct SweepK;
struct SweepNoise;
struct VerifyLemmas;

static COMMANDS: [&dyn Command; 5] = [&Forward, &Reconstruct, &SweepK, &SweepNoise, &VerifyLemmas];

pub fn commands() -> &'static [&'static dyn Command] {
    &COMMANDS
}

pub fn names() -> Vec<&'static str> {
    COMMANDS.iter().map(|c| c.name()).collect()
}

pub fn command(name: &str) -> Result<&'static dyn Command> {
    COMMANDS
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| HarnessError::Config(format!("unknown command {name:?}; known: {}", names().join(", "))))
}

fn out_dir(ctx: &RunContext) -> Result<PathBuf> {
    let dir = ctx.experiment.config.out.clone();
    fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    Ok(dir)
}

fn config_echo(exp: &Experiment) -> String {
    let c = &exp.config;
    format!(
        "d = {}, R = {}, source = {} (r = {}), K = {}, step = {}, rule = {}, boundary = {}x{}, ball = {}, target = {}, seed = {}",
        c.dim, c.radius, c.source_name, exp.source.support_radius, c.k_max, c.freq_step, c.freq_rule, c.n_theta,
        c.n_phi, c.ball_resolution, c.target_resolution, c.seed
    )
}

/// Stored dataset if `dataset` is configured, otherwise fresh forward data.
fn clean_data(exp: &Experiment) -> Result<Dataset> {
    match &exp.config.dataset {
        Some(path) => {
            let ds = Dataset::load(path)?;
            exp.check_dataset(&ds)?;
            Ok(ds)
        }
        None => exp.forward(),
    }
}

impl Command for Forward {
    fn name(&self) -> &'static str {
        "forward"
    }

    fn about(&self) -> &'static str {
        "simulate clean boundary data over the band and write the dataset"
    }

    fn run(&self, ctx: &RunContext) -> Result<Outcome> {
        let exp = &ctx.experiment;
        out_dir(ctx)?;
        let t = Instant::now();
        let ds = exp.forward()?;
        let path = exp.config.dataset_path();
        ds.save(&path)?;
        let summary = format!(
            "forward: {} wavenumbers on {} boundary nodes -> {}\n{}\nwall time {:.2} s\n",
            ds.blocks.len(),
            ds.grid.len(),
            path.display(),
            config_echo(exp),
            t.elapsed().as_secs_f64()
        );
        Ok(Outcome { files: vec![path], summary })
    }
}

/// Cache key over everything that determines the Fourier samples.
fn samples_key(exp: &Experiment, dataset: &Dataset, delta: f64, seed: u64) -> u64 {
    let mut h = DefaultHasher::new();
    for b in &dataset.blocks {
        b.kappa.to_bits().hash(&mut h);
        for v in b.dirichlet.iter() {
            (v.re.to_bits(), v.im.to_bits()).hash(&mut h);
        }
    }
    (delta.to_bits(), seed, exp.config.k_max.to_bits(), exp.directions.len()).hash(&mut h);
    exp.config.truncation.at().hash(&mut h);
    h.finish()
}

/// Fourier samples at the configured `K`, from the cache when it holds them.
pub fn cached_samples(exp: &Experiment, dataset: &Dataset, delta: f64, seed: u64) -> Result<(FourierSamples, bool)> {
    let dir = exp.config.out.join("cache");
    let path = dir.join(format!("samples-{:016x}.isfs", samples_key(exp, dataset, delta, seed)));
    if let Ok(f) = File::open(&path) {
        if let Ok(s) = read_fourier_samples(BufReader::new(f)) {
            return Ok((s, true));
        }
    }
    let observed = exp.observe(&dataset.blocks, delta, seed)?;
    let samples = exp.samples(&exp.fourier_blocks(&observed)?, exp.config.k_max)?;
    fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    let f = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    write_fourier_samples(&samples, BufWriter::new(f))?;
    Ok((samples, false))
}

impl Command for Reconstruct {
    fn name(&self) -> &'static str {
        "reconstruct"
    }

    fn about(&self) -> &'static str {
        "reconstruct f_K from the stored dataset with seeded noise"
    }

    fn run(&self, ctx: &RunContext) -> Result<Outcome> {
        let exp = &ctx.experiment;
        let c = &exp.config;
        let dir = out_dir(ctx)?;
        let t = Instant::now();
        let ds = Dataset::load(&c.dataset_path())?;
        exp.check_dataset(&ds)?;
        let (samples, hit) = cached_samples(exp, &ds, c.noise_delta, c.seed)?;
        let rec = exp.reconstruct(&samples)?;
        let err = l2_error(&rec, &exp.source)?;
        let norm = l2_norm_on(&rec, &exp.source);
        let observed = exp.observe(&ds.blocks, c.noise_delta, c.seed)?;
        let eps = exp.epsilon(&ds.blocks, &observed, c.k_max)?;
        let record = make_record(exp, "K", c.k_max, c.k_max, c.noise_delta, 1, eps, err, err / norm)?;

        let field_path = dir.join("reconstruction.csv");
        let mut w = csv::Writer::from_path(&field_path).map_err(|e| HarnessError::io(&field_path, e))?;
        w.write_record(["x", "y", "z", "re", "im", "exact_re", "exact_im"])?;
        for (y, v) in rec.grid.nodes.iter().zip(&rec.values) {
            let f = exp.source.evaluate(y);
            let row = [y[0], y[1], y[2], v.re, v.im, f.re, f.im].map(|x| format!("{x:.12e}"));
            w.write_record(row)?;
        }
        w.flush().map_err(|e| HarnessError::io(&field_path, e))?;
        let record_path = dir.join("reconstruct.csv");
        write_records(&record_path, std::slice::from_ref(&record))?;

        let summary = format!(
            "reconstruct: K = {}, delta = {}, seed = {}, samples {} ({})\nepsilon = {:.4e}, L2 error = {:.4e} (relative {:.4e}), low-pass oracle {:.4e}\n{}\nwall time {:.2} s\n",
            c.k_max,
            c.noise_delta,
            c.seed,
            samples.len(),
            if hit { "cached" } else { "computed" },
            eps,
            err,
            err / norm,
            record.lowpass_error,
            config_echo(exp),
            t.elapsed().as_secs_f64()
        );
        Ok(Outcome { files: vec![field_path, record_path], summary })
    }
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    exp: &Experiment,
    sweep: &'static str,
    value: f64,
    k: f64,
    delta: f64,
    seeds: usize,
    epsilon: f64,
    l2_error: f64,
    rel_error: f64,
) -> Result<ExperimentRecord> {
    let lowpass_error = exp.lowpass_error(k);
    let budget = exp.budget(epsilon, k, exp.bound_m()?)?;
    let bound = budget.map(|b| b.term_data + b.term_tail);
    Ok(ExperimentRecord {
        sweep,
        value,
        k_max: k,
        delta,
        seeds,
        epsilon,
        l2_error,
        rel_error,
        lowpass_error,
        lowpass_rel: lowpass_error / l2_norm_from_spectrum(&exp.source),
        term_data: budget.map(|b| b.term_data),
        term_tail: budget.map(|b| b.term_tail),
        fitted_c: bound.filter(|&b| b > 0.0).map(|b| l2_error * l2_error / b),
    })
}

/// Mean over `seeds` realisations at each `(k, delta)`; clean data needs one.
fn averaged(exp: &Experiment, clean: &Dataset, delta: f64, ks: &[f64]) -> Result<Vec<PointResult>> {
    let c = &exp.config;
    let runs = if delta == 0.0 { 1 } else { c.noise_seeds };
    let mut acc = vec![PointResult { epsilon: 0.0, l2_error: 0.0, rel_error: 0.0 }; ks.len()];
    for s in 0..runs {
        let one = exp.realisation(&clean.blocks, delta, c.seed.wrapping_add(s as u64), ks)?;
        for (a, p) in acc.iter_mut().zip(one) {
            a.epsilon += p.epsilon / runs as f64;
            a.l2_error += p.l2_error / runs as f64;
            a.rel_error += p.rel_error / runs as f64;
        }
    }
    Ok(acc)
}

fn finish_sweep(
    ctx: &RunContext,
    stem: &str,
    xlabel: &str,
    records: &[ExperimentRecord],
    started: Instant,
) -> Result<Outcome> {
    let dir = out_dir(ctx)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_records(&csv_path, records)?;
    let mut files = vec![csv_path];
    let mut summary = format!("{stem}: {} points\n{}\n", records.len(), config_echo(&ctx.experiment));
    let _ = writeln!(
        summary,
        "{:>10} {:>12} {:>12} {:>12} {:>12} {:>12}",
        xlabel, "epsilon", "rel_error", "lowpass_rel", "term_tail", "fitted_c"
    );
    for r in records {
        let _ = writeln!(
            summary,
            "{:>10.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12} {:>12}",
            r.value,
            r.epsilon,
            r.rel_error,
            r.lowpass_rel,
            r.term_tail.map_or("-".into(), |v| format!("{v:.4e}")),
            r.fitted_c.map_or("-".into(), |v| format!("{v:.4e}"))
        );
    }
    let _ = writeln!(summary, "wall time {:.2} s", started.elapsed().as_secs_f64());
    files.push(write_text(&dir.join(format!("{stem}_summary.txt")), &summary)?);
    if ctx.emit_plot_script {
        files.push(write_text(&dir.join(format!("{stem}.gp")), &plot_script(&format!("{stem}.csv"), xlabel))?);
    }
    Ok(Outcome { files, summary })
}

impl Command for SweepK {
    fn name(&self) -> &'static str {
        "sweep-k"
    }

    fn about(&self) -> &'static str {
        "reconstruction error against the band limit K at fixed noise"
    }

    fn run(&self, ctx: &RunContext) -> Result<Outcome> {
        let t = Instant::now();
        let exp = &ctx.experiment;
        let c = &exp.config;
        if c.sweep_k.is_empty() {
            return Err(HarnessError::Config("sweep-k needs a non-empty sweep.k".into()));
        }
        let clean = clean_data(exp)?;
        let points = averaged(exp, &clean, c.noise_delta, &c.sweep_k)?;
        let seeds = if c.noise_delta == 0.0 { 1 } else { c.noise_seeds };
        let records = c
            .sweep_k
            .iter()
            .zip(points)
            .map(|(&k, p)| make_record(exp, "K", k, k, c.noise_delta, seeds, p.epsilon, p.l2_error, p.rel_error))
            .collect::<Result<Vec<_>>>()?;
        finish_sweep(ctx, "sweep_k", "K", &records, t)
    }
}

impl Command for SweepNoise {
    fn name(&self) -> &'static str {
        "sweep-noise"
    }

    fn about(&self) -> &'static str {
        "reconstruction error and measured epsilon against the noise level at K"
    }

    fn run(&self, ctx: &RunContext) -> Result<Outcome> {
        let t = Instant::now();
        let exp = &ctx.experiment;
        let c = &exp.config;
        if c.sweep_delta.is_empty() {
            return Err(HarnessError::Config("sweep-noise needs a non-empty sweep.delta".into()));
        }
        let clean = clean_data(exp)?;
        let mut records = Vec::new();
        for &delta in &c.sweep_delta {
            let p = averaged(exp, &clean, delta, &[c.k_max])?[0];
            let seeds = if delta == 0.0 { 1 } else { c.noise_seeds };
            records.push(make_record(exp, "delta", delta, c.k_max, delta, seeds, p.epsilon, p.l2_error, p.rel_error)?);
        }
        finish_sweep(ctx, "sweep_noise", "delta", &records, t)
    }
}

impl Command for VerifyLemmas {
    fn name(&self) -> &'static str {
        "verify-lemmas"
    }

    fn about(&self) -> &'static str {
        "check the energy, Plancherel, tail-decay and mu inequalities on presets"
    }

    fn run(&self, ctx: &RunContext) -> Result<Outcome> {
        let t = Instant::now();
        let dir = out_dir(ctx)?;
        let checks = verify(&ctx.experiment.config)?;
        let path = dir.join("lemmas.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| HarnessError::io(&path, e))?;
        w.write_record(["source", "check", "quantity", "measured", "bound", "margin", "pass", "note"])?;
        let mut summary = String::new();
        for c in &checks {
            w.write_record([
                c.source.clone(),
                c.lemma.to_string(),
                c.quantity.clone(),
                format!("{:.12e}", c.measured),
                format!("{:.12e}", c.bound),
                format!("{:.6e}", c.margin()),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                c.note.clone(),
            ])?;
            let _ = writeln!(
                summary,
                "{} {:<13} {:<14} {:<40} measured {:.4e} bound {:.4e} margin {:.3e} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.lemma,
                c.source,
                c.quantity,
                c.measured,
                c.bound,
                c.margin(),
                c.note
            );
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
        let _ = writeln!(summary, "wall time {:.2} s", t.elapsed().as_secs_f64());
        let report = write_text(&dir.join("lemmas_summary.txt"), &summary)?;
        let failed: Vec<String> =
            checks.iter().filter(|c| !c.pass).map(|c| format!("{} [{}] {}", c.lemma, c.source, c.quantity)).collect();
        if !failed.is_empty() {
            return Err(HarnessError::Lemma(format!("{}\n{summary}", failed.join("; "))));
        }
        Ok(Outcome { files: vec![path, report], summary })
    }
}
