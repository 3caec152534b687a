//! Sweep records, CSV emission and plot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 13] = [
    "sweep",
    "value",
    "K",
    "delta",
    "seeds",
    "epsilon",
    "l2_error",
    "rel_error",
    "lowpass_error",
    "lowpass_rel",
    "term_data",
    "term_tail",
    "fitted_c",
];

/// One sweep point, averaged over noise realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    /// `"K"` or `"delta"`.
    pub sweep: &'static str,
    pub value: f64,
    pub k_max: f64,
    pub delta: f64,
    pub seeds: usize,
    pub epsilon: f64,
    pub l2_error: f64,
    pub rel_error: f64,
    pub lowpass_error: f64,
    pub lowpass_rel: f64,
    pub term_data: Option<f64>,
    pub term_tail: Option<f64>,
    /// `l2_error² / (term_data + term_tail)`; absent when the bound is zero
    /// or undefined.
    pub fitted_c: Option<f64>,
}

/// Fixed-precision so identical runs give identical bytes.
fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

impl ExperimentRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.sweep.to_string(),
            fmt(self.value),
            fmt(self.k_max),
            fmt(self.delta),
            self.seeds.to_string(),
            fmt(self.epsilon),
            fmt(self.l2_error),
            fmt(self.rel_error),
            fmt(self.lowpass_error),
            fmt(self.lowpass_rel),
            opt(self.term_data),
            opt(self.term_tail),
            opt(self.fitted_c),
        ]
    }
}

pub fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Reads back the numeric columns of a record CSV, keyed by header name.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<Option<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    let idx = r
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| HarnessError::Io(format!("{}: no column {column:?}", path.display())))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(rec.get(idx).and_then(|s| s.parse().ok()));
    }
    Ok(out)
}

/// A gnuplot script drawing error, low-pass error and `ε` against the sweep value.
pub fn plot_script(csv_name: &str, xlabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {csv_name}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set logscale y");
    if xlabel == "delta" {
        let _ = writeln!(s, "set logscale x");
    }
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel 'relative L2 error'");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{}.png'", csv_name.trim_end_matches(".csv"));
    let _ = writeln!(
        s,
        "plot '{csv_name}' using 2:8 with linespoints title 'reconstruction', \\\n     '' using 2:10 with lines dashtype 2 title 'low-pass oracle', \\\n     '' using 2:6 with linespoints title 'measured epsilon'"
    );
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))?;
    Ok(path.to_path_buf())
}
