//! On-disk formats.
//!
//! Per L, under `<out>/L<value>/`:
//! - `eigenvalues.csv`: columns `re, im, label, tail_ratio` (empty when no
//!   eigenvector was computed), one row per eigenvalue sorted by `re`.
//! - `eigenvalues.json`: the same rows as a JSON array.
//! - `matrix.bin`: the raw operator, if requested.
//!
//! Per run, under `<out>/`:
//! - `summary.json`: configuration, counts, bound states and transition
//!   for each L.
//! - `timing.json`: wall-clock and memory figures, kept apart so that the
//!   other files are reproducible byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use num_complex::Complex64;
use ptspectra::spectrum::{RunMetadata, Transition};
use ptspectra::{Label, SpectrumResult};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::run::{JobOutput, RunArtifact, Timing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub re: f64,
    pub im: f64,
    pub label: Label,
    pub tail_ratio: Option<f64>,
}

pub fn rows(result: &SpectrumResult) -> Vec<Row> {
    result
        .records
        .iter()
        .map(|r| Row {
            re: r.value.re,
            im: r.value.im,
            label: r.label,
            tail_ratio: r.tail_ratio,
        })
        .collect()
}

pub fn l_dir(out: &Path, half_width: f64) -> PathBuf {
    out.join(format!("L{half_width}"))
}

pub fn write_csv(rows: &[Row], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.map_err(anyhow::Error::from)).collect()
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes the per-L files for one finished job.
pub fn write_job(out: &Path, half_width: f64, formats: &[Format], job: &JobOutput) -> anyhow::Result<()> {
    let dir = l_dir(out, half_width);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let rows = rows(&job.result);
    for f in formats {
        match f {
            Format::Csv => write_csv(&rows, &dir.join("eigenvalues.csv"))?,
            Format::Json => write_json(&rows, &dir.join("eigenvalues.json"))?,
        }
    }
    if let Some(bytes) = &job.dump {
        fs::write(dir.join("matrix.bin"), bytes)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSummary {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub error: Option<String>,
    pub metadata: Option<RunMetadata>,
    pub bound_pairs: Option<usize>,
    pub counts: Option<Counts>,
    pub bound_states: Vec<Complex64>,
    pub transition: Option<Transition>,
    pub continuum_max_im: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub bound: usize,
    pub continuum_complex: usize,
    pub continuum_real: usize,
    pub unresolved: usize,
}

impl Counts {
    pub fn of(result: &SpectrumResult) -> Self {
        Self {
            bound: result.count(Label::Bound),
            continuum_complex: result.count(Label::ContinuumComplex),
            continuum_real: result.count(Label::ContinuumReal),
            unresolved: result.count(Label::Unresolved),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub config: ExperimentConfig,
    pub runs: Vec<LSummary>,
}

pub fn summarize_result(half_width: f64, result: &SpectrumResult) -> LSummary {
    LSummary {
        half_width,
        error: None,
        metadata: Some(result.metadata.clone()),
        bound_pairs: Some(result.bound_pairs),
        counts: Some(Counts::of(result)),
        bound_states: result.bound_states(),
        transition: result.transition.clone(),
        continuum_max_im: Some(result.continuum_max_im()),
    }
}

pub fn summarize(artifact: &RunArtifact) -> Summary {
    let runs = artifact
        .runs
        .iter()
        .map(|r| match &r.result {
            Some(res) => summarize_result(r.half_width, res),
            None => LSummary {
                half_width: r.half_width,
                error: r.error.clone(),
                metadata: None,
                bound_pairs: None,
                counts: None,
                bound_states: Vec::new(),
                transition: None,
                continuum_max_im: None,
            },
        })
        .collect();
    Summary {
        version: artifact.version.clone(),
        config: artifact.config.clone(),
        runs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TimingEntry {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(flatten)]
    timing: Timing,
}

/// Writes `summary.json` and `timing.json` for a finished run.
pub fn write_run_files(artifact: &RunArtifact, out: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    write_json(&summarize(artifact), &out.join("summary.json"))?;
    let timing: Vec<TimingEntry> = artifact
        .runs
        .iter()
        .map(|r| TimingEntry {
            half_width: r.half_width,
            timing: r.timing.clone(),
        })
        .collect();
    write_json(&timing, &out.join("timing.json"))
}
