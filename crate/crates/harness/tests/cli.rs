use std::fs;
use std::path::Path;
use std::process::Command;

use ptspectra::{Family, Label};
use ptspectra_harness::output::{read_csv, write_job, write_run_files};
use ptspectra_harness::{emit_plot_data, run_experiment, run_experiment_with, ExperimentConfig, Format, PlotKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptspectra"))
}

fn sweep(out: &Path, workers: usize, strength: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Family::Scarf2, strength, vec![10.0, 15.0, 20.0], 255);
    cfg.output_dir = out.to_path_buf();
    cfg.formats = vec![Format::Csv, Format::Json];
    cfg.workers = workers;
    let artifact = run_experiment_with(&cfg, |l, job| write_job(out, l, &cfg.formats, job)).unwrap();
    write_run_files(&artifact, out).unwrap();
    for kind in PlotKind::ALL {
        emit_plot_data(&artifact, kind, out).unwrap();
    }
    cfg
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), 1, 30.0);
    let path = dir.path().join("L10/eigenvalues.csv");
    let text = String::from_utf8(read(&path)).unwrap();
    assert_eq!(text.lines().next(), Some("re,im,label,tail_ratio"));

    let rows = read_csv(&path).unwrap();
    assert_eq!(rows.len(), 254);
    assert!(rows.windows(2).all(|w| w[0].re <= w[1].re));
    let bound: Vec<_> = rows.iter().filter(|r| r.label == Label::Bound).collect();
    assert_eq!(bound.len(), 4);
    for r in &rows {
        if r.im != 0.0 && r.label != Label::Unresolved {
            assert!(r.tail_ratio.is_some(), "{r:?}");
        }
    }
    let json: Vec<ptspectra_harness::output::Row> = serde_json::from_slice(&read(dir.path().join("L10/eigenvalues.json"))).unwrap();
    assert_eq!(json, rows);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    sweep(a.path(), 1, 30.0);
    sweep(b.path(), 3, 30.0);
    for l in ["L10", "L15", "L20"] {
        for f in ["eigenvalues.csv", "eigenvalues.json", "plot_complex_plane.csv", "plot_log_im.csv", "plot_loglog_bound.csv"] {
            assert_eq!(read(a.path().join(l).join(f)), read(b.path().join(l).join(f)), "{l}/{f}");
        }
    }
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_slice(&read(p.join("summary.json"))).unwrap();
        v["config"]["workers"] = 0.into();
        v["config"]["output_dir"] = "".into();
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
    assert!(a.path().join("timing.json").exists());
}

#[test]
fn plot_files_without_bound_states() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), 2, 0.0);
    let text = String::from_utf8(read(dir.path().join("L10/plot_loglog_bound.csv"))).unwrap();
    assert_eq!(text, "log10_re,log10_im\n");
    let complex = String::from_utf8(read(dir.path().join("L10/plot_complex_plane.csv"))).unwrap();
    assert_eq!(complex.lines().count(), 255);
    assert!(!complex.contains("bound"));
}

#[test]
fn log_im_plot_marks_the_transition() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), 1, 30.0);
    let text = String::from_utf8(read(dir.path().join("L10/plot_log_im.csv"))).unwrap();
    assert_eq!(text.lines().next(), Some("re,log10_abs_im,marker"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",transition")).count(), 1);
}

#[test]
fn pt_real_route_and_config_checks() {
    let mut cfg = ExperimentConfig::new(Family::Scarf2, 30.0, vec![10.0], 31);
    cfg.solver = ptspectra::Route::PtReal;
    let ok = run_experiment(&cfg).unwrap();
    assert!(ok.runs[0].result.is_some());

    cfg.n = 30;
    assert!(run_experiment(&cfg).is_err(), "even N must be rejected up front");
}

#[test]
fn config_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sweep(dir.path(), 2, 30.0);
    let path = dir.path().join("config.toml");
    fs::write(&path, cfg.to_toml()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
    fs::write(&path, format!("bogus = 1\n{}", cfg.to_toml())).unwrap();
    assert!(ExperimentConfig::load(&path).is_err());
    fs::write(&path, cfg.to_toml() + "tail_treshold = 1e-3\n").unwrap();
    assert!(ExperimentConfig::load(&path).is_err(), "misspelt policy keys are rejected");
}

#[test]
fn cli_dump_and_classify_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let st = bin()
        .args(["spectrum", "--L", "10", "--N", "127", "--dump-matrix", "--out"])
        .arg(&a)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    assert_eq!(fs::metadata(a.join("L10/matrix.bin")).unwrap().len(), 126 * 126 * 16);

    let st = bin()
        .args(["classify", "--L", "10", "--N", "127", "--matrix"])
        .arg(a.join("L10/matrix.bin"))
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    assert_eq!(read(a.join("L10/eigenvalues.csv")), read(b.join("L10/eigenvalues.csv")));

    let st = bin()
        .args(["classify", "--L", "10", "--N", "63", "--matrix"])
        .arg(a.join("L10/matrix.bin"))
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn cli_extrapolate_reads_eigenvalue_files() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.txt");
    let body: String = (1..=7)
        .map(|k| {
            let k = k as f64;
            format!("{} {}\n", 25.0 / (k * k) + 1.0 / k.powi(3), 61.0 / k.powi(3))
        })
        .collect();
    fs::write(&seq, format!("# synthetic\n{body}")).unwrap();
    let out = bin().args(["extrapolate", "--format", "json", "--input"]).arg(&seq).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - 25.0).abs() < 1e-8);
    assert!((v["beta"].as_f64().unwrap() - 61.0).abs() < 1e-8);

    let csv = dir.path().join("eigenvalues.csv");
    fs::write(&csv, "re,im,label,tail_ratio\n1,-2,bound,0\n1,2,bound,0\n0.5,0.25,bound,0\n3,0,continuum_real,\n0.25,0.0625,bound,0\n").unwrap();
    let out = bin().args(["extrapolate", "--input"]).arg(&csv).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("alpha,"), "{text}");
}

#[test]
fn cli_reproduce_reports_failures_as_json() {
    let out = bin().args(["reproduce", "--suite", "tables"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "tables");
    assert_eq!(v["passed"], false);
    assert_eq!(v["outcomes"][1]["id"], 8);
    assert_eq!(v["outcomes"][1]["passed"], true);

    let out = bin().args(["reproduce", "--suite", "box"]).output().unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("criterion  1: PASS"), "{stderr}");
}
