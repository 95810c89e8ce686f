//! Experiment orchestration for `ptspectra`: configuration files, per-L
//! jobs on a worker pool, CSV/JSON persistence, plot data and the
//! reproduction suite behind the `ptspectra` command-line tool.

pub mod config;
pub mod criteria;
pub mod output;
pub mod plot;
pub mod reference;
pub mod run;

pub use config::{ExperimentConfig, Format};
pub use criteria::{reproduce, Outcome, Report, RunCache, Suite};
pub use plot::{emit_plot_data, PlotKind};
pub use run::{run_experiment, run_experiment_with, Job, JobOutput, LRun, RunArtifact, Timing};
