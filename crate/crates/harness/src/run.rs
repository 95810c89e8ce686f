//! Per-L jobs: assemble, eigensolve, classify.

use std::time::Instant;

use anyhow::Context;
use ptspectra::operator::write_matrix;
use ptspectra::spectrum::classify;
use ptspectra::{ClassificationPolicy, DoubleDouble, Eigensystem, OperatorMatrix, PotentialSpec, Precision, Real, Route, SpectrumResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wall-clock seconds per stage and the storage of one matrix copy.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub assemble: f64,
    pub eigenvalues: f64,
    pub classify: f64,
    pub matrix_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LRun {
    pub half_width: f64,
    pub result: Option<SpectrumResult>,
    pub error: Option<String>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: ExperimentConfig,
    pub version: String,
    pub runs: Vec<LRun>,
}

impl RunArtifact {
    pub fn results(&self) -> impl Iterator<Item = &SpectrumResult> {
        self.runs.iter().filter_map(|r| r.result.as_ref())
    }
}

/// Everything needed for one spectrum.
#[derive(Debug, Clone)]
pub struct Job {
    pub spec: PotentialSpec,
    pub half_width: f64,
    pub n: usize,
    pub precision: Precision,
    pub route: Route,
    pub policy: ClassificationPolicy,
}

pub struct JobOutput {
    pub result: SpectrumResult,
    pub timing: Timing,
    /// Raw matrix bytes, if requested.
    pub dump: Option<Vec<u8>>,
}

impl Job {
    pub fn run(&self, dump: bool) -> ptspectra::Result<JobOutput> {
        match self.precision {
            Precision::Double => self.run_typed::<f64>(dump),
            Precision::Extended => self.run_typed::<DoubleDouble>(dump),
        }
    }

    fn run_typed<T: Real>(&self, dump: bool) -> ptspectra::Result<JobOutput> {
        let t0 = Instant::now();
        let op = OperatorMatrix::<T>::build(&self.spec, self.half_width, self.n)?;
        let dump = dump.then(|| {
            let mut buf = Vec::new();
            write_matrix(&op.matrix, &mut buf).expect("writing to memory");
            buf
        });
        let t1 = Instant::now();
        let system = Eigensystem::new(&op.matrix, self.route)?;
        let solution = system.eigenvalues()?;
        let t2 = Instant::now();
        let result = classify(&solution, &system, &op, &self.policy)?;
        let t3 = Instant::now();
        let m = op.dimension();
        Ok(JobOutput {
            result,
            timing: Timing {
                assemble: (t1 - t0).as_secs_f64(),
                eigenvalues: (t2 - t1).as_secs_f64(),
                classify: (t3 - t2).as_secs_f64(),
                matrix_bytes: m * m * 2 * T::BYTES,
            },
            dump,
        })
    }
}

/// Runs every L of `config` on a pool of `config.workers` threads.
///
/// A failing L records its error and does not stop the others. Results do
/// not depend on the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<RunArtifact> {
    run_experiment_with(config, |_, _| Ok(()))
}

/// As [`run_experiment`], handing each finished job to `sink` (used to
/// write per-L files as soon as they are ready).
pub fn run_experiment_with(
    config: &ExperimentConfig,
    sink: impl Fn(f64, &JobOutput) -> anyhow::Result<()> + Sync,
) -> anyhow::Result<RunArtifact> {
    config.validate()?;
    let spec = config.potential()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("building worker pool")?;
    let runs = pool.install(|| {
        config
            .half_widths
            .par_iter()
            .map(|&l| {
                let job = Job {
                    spec: spec.clone(),
                    half_width: l,
                    n: config.n,
                    precision: config.precision,
                    route: config.solver,
                    policy: config.policy,
                };
                match job.run(config.dump_matrix).map_err(anyhow::Error::from).and_then(|out| {
                    sink(l, &out)?;
                    Ok(out)
                }) {
                    Ok(out) => LRun {
                        half_width: l,
                        result: Some(out.result),
                        error: None,
                        timing: out.timing,
                    },
                    Err(e) => LRun {
                        half_width: l,
                        result: None,
                        error: Some(format!("{e:#}")),
                        timing: Timing::default(),
                    },
                }
            })
            .collect()
    });
    Ok(RunArtifact {
        config: config.clone(),
        version: VERSION.to_string(),
        runs,
    })
}
