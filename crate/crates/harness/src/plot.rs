//! Figure-ready data files. Rendering is left to external tools.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ptspectra::{Label, SpectrumResult};
use serde::{Deserialize, Serialize};

use crate::output::l_dir;
use crate::run::RunArtifact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    /// `re, im, label` for every eigenvalue.
    ComplexPlane,
    /// `re, log10_abs_im, marker` for the upper half plane, plus one row
    /// with marker `transition` at the detected transition.
    LogIm,
    /// `log10_re, log10_im` for bound states with `Im > 0`.
    LoglogBound,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::ComplexPlane, PlotKind::LogIm, PlotKind::LoglogBound];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::ComplexPlane => "plot_complex_plane.csv",
            PlotKind::LogIm => "plot_log_im.csv",
            PlotKind::LoglogBound => "plot_loglog_bound.csv",
        }
    }
}

/// `log10(|Im| + eps max(|E|, 1))`, the quantity scanned for the transition.
pub fn log_im(result: &SpectrumResult, value: num_complex::Complex64) -> f64 {
    let eps = result.metadata.precision.epsilon();
    (value.im.abs() + eps * value.norm().max(1.0)).log10()
}

pub fn write_plot(result: &SpectrumResult, kind: PlotKind, out: &mut impl Write) -> std::io::Result<()> {
    match kind {
        PlotKind::ComplexPlane => {
            writeln!(out, "re,im,label")?;
            for r in &result.records {
                writeln!(out, "{},{},{}", r.value.re, r.value.im, r.label)?;
            }
        }
        PlotKind::LogIm => {
            writeln!(out, "re,log10_abs_im,marker")?;
            for r in result.records.iter().filter(|r| r.value.im >= 0.0) {
                writeln!(out, "{},{},", r.value.re, log_im(result, r.value))?;
            }
            if let Some(t) = &result.transition {
                writeln!(out, "{},{},transition", t.location, log_im(result, t.below))?;
            }
        }
        PlotKind::LoglogBound => {
            writeln!(out, "log10_re,log10_im")?;
            for r in result.records.iter().filter(|r| r.label == Label::Bound && r.value.im > 0.0) {
                writeln!(out, "{},{}", r.value.re.log10(), r.value.im.log10())?;
            }
        }
    }
    Ok(())
}

/// Writes `kind` for every successful L of `artifact`; returns the paths.
pub fn emit_plot_data(artifact: &RunArtifact, kind: PlotKind, out: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for run in &artifact.runs {
        let Some(result) = &run.result else { continue };
        let dir = l_dir(out, run.half_width);
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(kind.file_name());
        let mut w = BufWriter::new(File::create(&path)?);
        write_plot(result, kind, &mut w)?;
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}
