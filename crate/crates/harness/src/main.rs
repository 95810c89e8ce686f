use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ptspectra::operator::read_matrix;
use ptspectra::spectrum::classify;
use ptspectra::{
    estimate_balmer, parse_two_column, DoubleDouble, Eigensystem, Family, Label, OperatorMatrix, Precision, Real, Route,
    SpectrumResult,
};
use ptspectra_harness::output::{self, read_csv, summarize_result, write_run_files};
use ptspectra_harness::{emit_plot_data, reproduce, run_experiment_with, ExperimentConfig, Format, PlotKind, RunCache, Suite};

#[derive(Parser)]
#[command(name = "ptspectra", version, about = "Spectra of PT-symmetric Schrodinger operators on a truncated line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and classify the spectrum for one L.
    Spectrum(SpectrumArgs),
    /// Run several L values, from flags or a TOML config.
    Sweep(SweepArgs),
    /// Eigensolve and classify a matrix dumped with --dump-matrix.
    Classify(ClassifyArgs),
    /// Richardson tables and Balmer constants of a bound-state sequence.
    Extrapolate(ExtrapolateArgs),
    /// Run the numbered reproduction criteria.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
struct Physics {
    #[arg(long, default_value = "scarf2")]
    family: Family,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    strength: f64,
    #[arg(long = "N", default_value_t = 1023)]
    n: usize,
    #[arg(long, default_value = "double")]
    precision: Precision,
    /// auto, complex or pt_real.
    #[arg(long, default_value = "auto")]
    solver: Route,
    /// Strict-rule tail ratio threshold for the bound label.
    #[arg(long)]
    tail_threshold: Option<f64>,
}

#[derive(Args, Clone)]
struct Outputs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output formats for eigenvalue tables; repeatable.
    #[arg(long, value_enum, default_values_t = [Format::Csv])]
    format: Vec<Format>,
    /// Also write plot data files.
    #[arg(long, value_enum)]
    plot: Vec<PlotKind>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L", default_value_t = 10.0)]
    half_width: f64,
    #[command(flatten)]
    outputs: Outputs,
    /// Write the assembled matrix to <out>/L<value>/matrix.bin.
    #[arg(long)]
    dump_matrix: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML experiment file; other flags are ignored except --workers.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [10.0, 100.0])]
    half_widths: Vec<f64>,
    #[command(flatten)]
    outputs: Outputs,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dump_matrix: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Raw matrix dump (row-major, little-endian re/im pairs).
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L")]
    half_width: f64,
    #[command(flatten)]
    outputs: Outputs,
}

#[derive(Args)]
struct ExtrapolateArgs {
    /// Two-column `re im` text, or an eigenvalues.csv whose bound rows are used.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, value_enum, default_value_t = Suite::Desk)]
    suite: Suite,
    /// Include the L = 1000, N = 16383 extended-precision runs.
    #[arg(long)]
    paper_scale: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_from(physics: &Physics, half_widths: Vec<f64>, outputs: &Outputs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(physics.family, physics.strength, half_widths, physics.n);
    cfg.precision = physics.precision;
    cfg.solver = physics.solver;
    cfg.output_dir = outputs.out.clone();
    cfg.formats = outputs.format.clone();
    if let Some(t) = physics.tail_threshold {
        cfg.policy.bound_tail_threshold = t;
    }
    cfg
}

fn print_result(half_width: f64, r: &SpectrumResult) {
    let s = summarize_result(half_width, r);
    println!(
        "L = {half_width}: {} eigenvalues, {} bound pairs, route {}",
        r.records.len(),
        r.bound_pairs,
        r.metadata.route
    );
    for z in &s.bound_states {
        println!("  bound {:.12} {:+.12}i", z.re, z.im);
    }
    match &r.transition {
        Some(t) => println!("  transition at {:.4} ({:.1} decades)", t.location, t.drop_decades),
        None => println!("  no transition detected"),
    }
    let unresolved = r.count(Label::Unresolved);
    if unresolved > 0 {
        println!("  {unresolved} unresolved");
    }
}

fn run_config(cfg: &ExperimentConfig, plots: &[PlotKind]) -> anyhow::Result<bool> {
    cfg.validate()?;
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("config.toml"), cfg.to_toml())?;
    let artifact = run_experiment_with(cfg, |l, job| output::write_job(&out, l, &cfg.formats, job))?;
    write_run_files(&artifact, &out)?;
    for &kind in plots {
        emit_plot_data(&artifact, kind, &out)?;
    }
    let mut ok = true;
    for run in &artifact.runs {
        match (&run.result, &run.error) {
            (Some(r), _) => print_result(run.half_width, r),
            (None, Some(e)) => {
                ok = false;
                eprintln!("L = {}: failed: {e}", run.half_width);
            }
            (None, None) => unreachable!("a run has either a result or an error"),
        }
    }
    println!("wrote {}", out.display());
    Ok(ok)
}

fn classify_dump<T: Real>(args: &ClassifyArgs) -> anyhow::Result<SpectrumResult> {
    let p = &args.physics;
    let mut op = OperatorMatrix::<T>::build(&ptspectra::PotentialSpec::new(p.family, p.strength)?, args.half_width, p.n)?;
    let mut f = File::open(&args.matrix).with_context(|| format!("opening {}", args.matrix.display()))?;
    let m = read_matrix::<T>(&mut f)?;
    if m.rows() != op.dimension() {
        bail!("dump is {}x{}, but N = {} needs order {}", m.rows(), m.cols(), p.n, op.dimension());
    }
    op.matrix = m;
    let mut policy = ptspectra::ClassificationPolicy::default();
    if let Some(t) = p.tail_threshold {
        policy.bound_tail_threshold = t;
    }
    let system = Eigensystem::new(&op.matrix, p.solver)?;
    let solution = system.eigenvalues()?;
    Ok(classify(&solution, &system, &op, &policy)?)
}

fn load_sequence(path: &Path) -> anyhow::Result<Vec<num_complex::Complex64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.lines().next().is_some_and(|h| h.trim_start().starts_with("re,im,label")) {
        let rows = read_csv(path)?;
        return Ok(rows
            .into_iter()
            .filter(|r| r.label == Label::Bound && r.im > 0.0)
            .map(|r| num_complex::Complex64::new(r.re, r.im))
            .collect());
    }
    Ok(parse_two_column(&text)?)
}

fn extrapolate(args: &ExtrapolateArgs) -> anyhow::Result<()> {
    let seq = load_sequence(&args.input)?;
    let est = estimate_balmer(&seq)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&est)?),
        Format::Csv => {
            for (name, table) in [("k^2 Re E_k", &est.real_table), ("k^3 |Im E_k|", &est.imag_table)] {
                let header: Vec<String> = (1..=table.max_order()).map(|m| format!("R{m}")).collect();
                println!("k,{name},{}", header.join(","));
                for (k, a) in table.input.iter().enumerate() {
                    let cells: Vec<String> = table
                        .columns
                        .iter()
                        .map(|c| c.get(k).map_or(String::new(), |x| format!("{x:.6}")))
                        .collect();
                    println!("{},{a:.6},{}", k + 1, cells.join(","));
                }
                println!();
            }
            println!("alpha,{:.6},spread,{:.6}", est.alpha, est.alpha_spread);
            println!("beta,{:.6},spread,{:.6}", est.beta, est.beta_spread);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: anyhow::Result<bool> = match cli.command {
        Command::Spectrum(a) => {
            let mut cfg = config_from(&a.physics, vec![a.half_width], &a.outputs);
            cfg.dump_matrix = a.dump_matrix;
            run_config(&cfg, &a.outputs.plot)
        }
        Command::Sweep(a) => {
            let cfg = match &a.config {
                Some(path) => ExperimentConfig::load(path).map(|mut c| {
                    if let Some(w) = a.workers {
                        c.workers = w;
                    }
                    c
                }),
                None => {
                    let mut c = config_from(&a.physics, a.half_widths.clone(), &a.outputs);
                    c.workers = a.workers.unwrap_or(1);
                    c.dump_matrix = a.dump_matrix;
                    Ok(c)
                }
            };
            cfg.and_then(|c| run_config(&c, &a.outputs.plot))
        }
        Command::Classify(a) => {
            let r = match a.physics.precision {
                Precision::Double => classify_dump::<f64>(&a),
                Precision::Extended => classify_dump::<DoubleDouble>(&a),
            };
            r.and_then(|r| {
                print_result(a.half_width, &r);
                let dir = output::l_dir(&a.outputs.out, a.half_width);
                std::fs::create_dir_all(&dir)?;
                let rows = output::rows(&r);
                for f in &a.outputs.format {
                    match f {
                        Format::Csv => output::write_csv(&rows, &dir.join("eigenvalues.csv"))?,
                        Format::Json => output::write_json(&rows, &dir.join("eigenvalues.json"))?,
                    }
                }
                output::write_json(&summarize_result(a.half_width, &r), &dir.join("summary.json"))?;
                Ok(true)
            })
        }
        Command::Extrapolate(a) => extrapolate(&a).map(|_| true),
        Command::Reproduce(a) => {
            let suite = if a.paper_scale { Suite::PaperScale } else { a.suite };
            let cache = RunCache::new();
            let report = reproduce(suite, &cache, |o| {
                eprintln!("{o}");
                for n in &o.notes {
                    eprintln!("    note: {n}");
                }
            });
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{json}");
            let written = match &a.out {
                Some(p) => File::create(p).and_then(|mut f| writeln!(f, "{json}")).with_context(|| format!("writing {}", p.display())),
                None => Ok(()),
            };
            written.map(|_| report.passed)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
