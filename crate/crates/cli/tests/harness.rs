use std::fs;
use std::path::Path;

use lipbandit_cli::experiment::{file_sha256, MANIFEST_FILE, SUMMARY_FILE, TRACE_DIR};
use lipbandit_cli::{analyze_dir, parse_config, run_experiment, ExperimentError, RunOptions};

fn config(body: &str) -> lipbandit_cli::ExperimentConfig {
    parse_config(body).unwrap()
}

const SMALL: &str = r#"
[instance]
family = "cone"
center = [0.5]

[run]
algorithm = "paco"
horizons = [1000]
seeds = [1]
"#;

fn opts(out: &Path) -> RunOptions {
    RunOptions { out: Some(out.to_path_buf()), ..Default::default() }
}

fn count_traces(dir: &Path) -> usize {
    fs::read_dir(dir.join(TRACE_DIR)).map(|d| d.count()).unwrap_or(0)
}

#[test]
fn single_run_writes_three_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let outcome = run_experiment(&config(SMALL), &opts(&out)).unwrap();
    assert_eq!(count_traces(&out), 1);
    assert!(out.join(SUMMARY_FILE).is_file() && out.join(MANIFEST_FILE).is_file());
    assert_eq!(outcome.manifest.files.len(), 2);

    let csv = fs::read_to_string(out.join(TRACE_DIR).join("T1000_seed1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,phase,x0,reward,gap,cumulative_regret"));
    assert_eq!(lines.count(), 1000);
    let run = &outcome.summary.runs[0];
    assert_eq!((run.horizon, run.seed, run.pulls), (1000, 1, 1000));
    assert!(outcome.summary.report.is_some());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(&SMALL.replace("seeds = [1]", "seeds = [1, 2, 3]").replace("[1000]", "[500, 2000]"));
    let a = run_experiment(&cfg, &RunOptions { workers: Some(1), ..opts(&tmp.path().join("a")) }).unwrap();
    let b = run_experiment(&cfg, &RunOptions { workers: Some(4), ..opts(&tmp.path().join("b")) }).unwrap();
    assert_eq!(a.manifest, b.manifest);
    assert_eq!(
        fs::read(tmp.path().join("a").join(MANIFEST_FILE)).unwrap(),
        fs::read(tmp.path().join("b").join(MANIFEST_FILE)).unwrap()
    );
}

#[test]
fn sweep_counts_and_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace("\"paco\"", "\"grid_ucb\"")
        .replace("[1000]", "[100, 1000, 10000, 40000]")
        .replace("seeds = [1]", "seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]");
    let outcome = run_experiment(&config(&text), &opts(tmp.path())).unwrap();
    assert_eq!(count_traces(tmp.path()), 40);
    assert_eq!(outcome.manifest.files.len(), 41);
    let fit = outcome.summary.curve.exponent.as_ref().expect("four horizons and ten seeds are enough to fit");
    assert!(fit.slope > 0.0 && fit.slope < 1.0, "{fit:?}");
    assert!(fit.ci_low <= fit.slope && fit.slope <= fit.ci_high);
    let report = outcome.summary.report.unwrap();
    assert_eq!(report.curves.len(), 1);
}

#[test]
fn adding_a_horizon_keeps_existing_runs() {
    let tmp = tempfile::tempdir().unwrap();
    run_experiment(&config(SMALL), &opts(&tmp.path().join("a"))).unwrap();
    run_experiment(&config(&SMALL.replace("[1000]", "[300, 1000]")), &opts(&tmp.path().join("b"))).unwrap();
    let name = Path::new(TRACE_DIR).join("T1000_seed1.csv");
    assert_eq!(
        file_sha256(&tmp.path().join("a").join(&name)).unwrap(),
        file_sha256(&tmp.path().join("b").join(&name)).unwrap()
    );
}

#[test]
fn seed_offset_shifts_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let shifted = run_experiment(&config(SMALL), &RunOptions { seed_offset: 1, ..opts(&tmp.path().join("a")) }).unwrap();
    let plain = run_experiment(&config(&SMALL.replace("[1]", "[2]")), &opts(&tmp.path().join("b"))).unwrap();
    assert_eq!(shifted.summary.runs[0].seed, 2);
    let name = Path::new(TRACE_DIR).join("T1000_seed2.csv");
    assert_eq!(fs::read(tmp.path().join("a").join(&name)).unwrap(), fs::read(tmp.path().join("b").join(&name)).unwrap());
    assert_eq!(plain.summary.runs, shifted.summary.runs);
}

#[test]
fn failure_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    // A directory squatting on the summary path makes the final rename fail
    // after every trace has been written.
    fs::create_dir_all(tmp.path().join(SUMMARY_FILE)).unwrap();
    let err = run_experiment(&config(SMALL), &opts(tmp.path())).unwrap_err();
    assert!(matches!(err, ExperimentError::Io { .. }), "{err}");
    assert_eq!(count_traces(tmp.path()), 0);
    assert!(!tmp.path().join(MANIFEST_FILE).exists());
    let leftovers: Vec<_> = fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers, vec![std::ffi::OsString::from(SUMMARY_FILE)]);
}

#[test]
fn failed_runs_leave_no_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    // The cone has arbitrarily small gaps, so the reduction has nothing to use.
    let cfg = config(&SMALL.replace("\"paco\"", "\"positive_gap_ucb\""));
    assert!(matches!(run_experiment(&cfg, &opts(&out)), Err(ExperimentError::MissingGap)));
    assert!(!out.exists());
}

#[test]
fn analyze_verifies_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(&SMALL.replace("seeds = [1]", "seeds = [1, 2]"));
    let outcome = run_experiment(&cfg, &opts(tmp.path())).unwrap();
    let analysis = analyze_dir(tmp.path()).unwrap();
    assert_eq!(analysis.verified_files, 3);
    assert_eq!(analysis.curve, outcome.summary.curve);

    let victim = tmp.path().join(TRACE_DIR).join("T1000_seed2.csv");
    let mut text = fs::read_to_string(&victim).unwrap();
    text.push_str("1001,9,0.5,1,0,0\n");
    fs::write(&victim, text).unwrap();
    assert!(matches!(analyze_dir(tmp.path()), Err(ExperimentError::HashMismatch { .. })));
}

#[test]
fn every_algorithm_runs_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    let step = r#"
[instance]
family = "one_sided_step"
peak = 0.0
width = 0.2
rise = 1.0
drop = 0.2
tail_slope = 0.5

[run]
algorithm = "ALG"
horizons = [2000]
seeds = [3]
noise = "bernoulli"

[output]
traces = false
"#;
    for alg in ["paco", "paco_one_sided", "positive_gap_ucb", "grid_ucb", "sous"] {
        let out = tmp.path().join(alg);
        let o = run_experiment(&config(&step.replace("ALG", alg)), &opts(&out)).unwrap();
        assert_eq!(o.summary.runs[0].pulls, 2000, "{alg}");
        assert_eq!(count_traces(&out), 0);
    }
}
