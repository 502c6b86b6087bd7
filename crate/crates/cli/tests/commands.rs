use std::path::{Path, PathBuf};
use std::process::Command as Process;

use nmf_merge_cli::commands::{self, ComparePair, CompareSummary, SweepParameter};
use nmf_merge_cli::manifest::{RunManifest, Source};
use serde_json::Value;

fn manifest(fixture: &str, rank: usize, seeds: u64) -> RunManifest {
    let mut m = RunManifest::new(Source::Fixture(fixture.into()), rank, PathBuf::new());
    m.seeds = (0..seeds).collect();
    m
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_nmf-merge"))
}

fn run_cli(args: &[&str], out: &Path) -> std::process::Output {
    binary().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn factorize_emits_one_row_per_seed() {
    let m = manifest("appendix-a", 4, 5);
    let out = commands::factorize(&m, &m.load_data().unwrap()).unwrap();
    let runs = out.report["results"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    for (i, r) in runs.iter().enumerate() {
        assert_eq!(r["seed"], i as u64);
        assert!(r["fitting_error_percent"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(csv_rows(&out.csv).len(), 5);
    assert!(out.failures.is_empty());
}

#[test]
fn trace_rows_increase_in_iteration() {
    let mut m = manifest("appendix-a", 4, 2);
    m.trace = true;
    let x = m.load_data().unwrap();
    let fact = commands::factorize(&m, &x).unwrap();
    let pipe = commands::pipeline(&m, &x).unwrap();
    assert_eq!(fact.traces.len(), 2);
    assert_eq!(fact.report["time_reconstruction"], commands::TIME_RECONSTRUCTION);
    for (_, text) in fact.traces.iter().chain(&pipe.traces) {
        let rows = csv_rows(text);
        assert!(rows.len() > 2);
        for w in rows.windows(2).filter(|w| w[0][0] == w[1][0]) {
            let (a, b): (usize, usize) = (w[0][1].parse().unwrap(), w[1][1].parse().unwrap());
            assert!(a < b, "{a} then {b}");
        }
        let objective: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(objective.iter().all(|o| o.is_finite() && *o >= 0.0));
    }
}

#[test]
fn reruns_are_byte_identical_and_ignore_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["pipeline", "--fixture", "appendix-a", "--rank", "4", "--seeds", "4", "--trace"];
    let a = run_cli(&args, &dir.path().join("a"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let mut par = args.to_vec();
    par.extend(["--parallel", "3"]);
    let b = run_cli(&par, &dir.path().join("b"));
    assert!(b.status.success());
    let read = |sub: &str, file: &str| std::fs::read_to_string(dir.path().join(sub).join(file)).unwrap();
    assert_eq!(read("a", "report.json"), read("b", "report.json"));
    // Trace times are measured, so only stage, iteration and objective repeat.
    let untimed = |text: String| -> Vec<Vec<String>> {
        csv_rows(&text).into_iter().map(|r| vec![r[0].clone(), r[1].clone(), r[3].clone()]).collect()
    };
    let trace = "traces/pipeline_seed2.csv";
    assert_eq!(untimed(read("a", trace)), untimed(read("b", trace)));
    assert!(dir.path().join("a/timings.json").exists());
}

#[test]
fn compare_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let status = run_cli(&["compare", "--fixture", "appendix-a", "--rank", "4", "--seeds", "6", "--format", "csv"], &out);
    assert!(status.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let pairs: Vec<ComparePair> = serde_json::from_value(report["results"]["pairs"].clone()).unwrap();
    let summary: CompareSummary = serde_json::from_value(report["results"]["summary"].clone()).unwrap();
    assert_eq!(pairs.len(), 6);
    assert_eq!(summary.pipeline_not_worse, pairs.iter().filter(|p| p.pipeline_not_worse).count());
    let manifest: RunManifest = serde_json::from_value(report["manifest"].clone()).unwrap();
    assert_eq!(manifest.seeds, (0..6).collect::<Vec<u64>>());

    let m = manifest_with_out(manifest);
    let direct = commands::compare(&m, &m.load_data().unwrap()).unwrap();
    let again: Vec<ComparePair> = serde_json::from_value(direct.report["results"]["pairs"].clone()).unwrap();
    assert_eq!(again, pairs);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    for (row, p) in csv_rows(&csv).iter().zip(&pairs) {
        assert_eq!(row[1].parse::<f64>().unwrap(), p.standard_fitting_error_percent);
    }
}

fn manifest_with_out(mut m: RunManifest) -> RunManifest {
    m.out_dir = PathBuf::from("unused");
    m
}

#[test]
fn compare_on_an_exactly_solvable_problem_pairs_near_zero() {
    let mut m = manifest("planted-20x30-r1-s4", 1, 1);
    m.eps_final = 1e-14;
    let out = commands::compare(&m, &m.load_data().unwrap()).unwrap();
    let pair: ComparePair = serde_json::from_value(out.report["results"]["pairs"][0].clone()).unwrap();
    assert!(pair.standard_fitting_error_percent < 1e-8, "{pair:?}");
    assert!(pair.pipeline_fitting_error_percent < 1e-8, "{pair:?}");
}

#[test]
fn consistency_pair_counts() {
    for s in [2u64, 4] {
        let m = manifest("appendix-a", 4, s);
        let out = commands::consistency(&m, &m.load_data().unwrap()).unwrap();
        let pairs = out.report["results"]["pairs"].as_array().unwrap();
        let expected = (s * (s - 1) / 2) as usize;
        for method in ["standard", "pipeline"] {
            assert_eq!(pairs.iter().filter(|p| p["method"] == method).count(), expected);
        }
        for p in pairs {
            let delta = p["fit_error_delta"].as_f64().unwrap();
            assert_eq!(p["pc_r1"].is_null(), delta.abs() >= commands::PC_FIT_MISMATCH, "{p}");
        }
    }
}

#[test]
fn repeated_seed_has_zero_subspace_distance() {
    let mut m = manifest("appendix-a", 4, 1);
    m.seeds = vec![7, 7, 7];
    let out = commands::consistency(&m, &m.load_data().unwrap()).unwrap();
    let pairs = out.report["results"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    for p in pairs {
        assert!(p["subspace_d"].as_f64().unwrap().abs() < 1e-10, "{p}");
        assert!(p["pc_r1"].as_f64().unwrap().abs() < 1e-12, "{p}");
    }
}

#[test]
fn extra_k_sweep_has_three_groups() {
    let m = manifest("appendix-a", 4, 3);
    let x = m.load_data().unwrap();
    let values = SweepParameter::ExtraK.default_values(&m);
    assert_eq!(values, vec![1.0, 2.0, 3.0]);
    let out = commands::sweep(&m, &x, SweepParameter::ExtraK, &values).unwrap();
    let groups = out.report["results"]["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 3);
    for g in groups {
        assert_eq!(g["cells"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn tolerance_sweep_records_five_stage_columns() {
    let m = manifest("appendix-a", 4, 2);
    let out = commands::sweep(&m, &m.load_data().unwrap(), SweepParameter::Tolerances, &[1e-1, 1e-2]).unwrap();
    let columns = ["initial_nmf", "feature_recovery", "overcomplete_nmf", "merge", "final_nmf"];
    assert_eq!(out.report["results"]["stage_timing_columns"], serde_json::json!(columns));
    let runs = out.timings["runs"].as_array().unwrap();
    let staged: Vec<&Value> = runs.iter().filter(|r| r.get("merge").is_some()).collect();
    assert_eq!(staged.len(), 4);
    for r in staged {
        for c in columns {
            assert!(r[c].as_f64().unwrap() >= 0.0);
        }
    }
    let cell = &out.report["results"]["groups"][0]["cells"][0];
    assert!(cell["initial_iterations"].as_u64().unwrap() >= 1);
}

fn rank_medians(eps: f64) -> Vec<(f64, f64)> {
    let mut m = manifest("appendix-a", 4, 20);
    m.eps_final = eps;
    let out = commands::sweep(&m, &m.load_data().unwrap(), SweepParameter::Rank, &[3.0, 4.0, 5.0]).unwrap();
    out.report["results"]["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["median_standard"].as_f64().unwrap(), g["median_pipeline"].as_f64().unwrap()))
        .collect()
}

// Rank 5 contains every rank-4 solution, so it can only tie rank 4 on the
// fixture. Measured over seeds 0..20: at eps 1e-4 rank 5 is strictly lower
// for both methods; at eps 1e-12 ranks 4 and 5 agree to within 1e-6 points
// while rank 3 stays at its ~0.234% floor.
#[test]
fn rank_sweep_measured_ordering() {
    let loose = rank_medians(1e-4);
    assert!(loose[2].0 < loose[1].0 && loose[2].1 < loose[1].1, "{loose:?}");

    let tight = rank_medians(1e-12);
    for method in 0..2 {
        let pick = |g: &(f64, f64)| if method == 0 { g.0 } else { g.1 };
        let best = tight.iter().map(pick).fold(f64::INFINITY, f64::min);
        assert!(pick(&tight[1]) - best < 1e-6, "{tight:?}");
        assert!(pick(&tight[0]) > 0.2, "{tight:?}");
    }
}

// Frozen after the first measured run. The acceptance target asserts the
// 80-seed threshold; this pins the actual count so regressions show up.
#[test]
fn fixture_compare_regression_count() {
    let mut m = manifest("appendix-a", 4, 100);
    m.extra_k = 1;
    m.eps_initial = 1e-2;
    m.eps_overcomplete = 1e-2;
    m.eps_final = 1e-4;
    let out = commands::compare(&m, &m.load_data().unwrap()).unwrap();
    let summary: CompareSummary = serde_json::from_value(out.report["results"]["summary"].clone()).unwrap();
    assert_eq!(summary.seeds, 100);
    assert_eq!(summary.pipeline_not_worse, 54);
    assert_eq!(summary.pipeline_strictly_better, 54);
}

#[test]
fn errors_give_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = run_cli(&["factorize", "--fixture", "no-such-fixture", "--rank", "2"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("no-such-fixture"));

    let input = dir.path().join("neg.csv");
    std::fs::write(&input, "1,2\n3,-4\n").unwrap();
    let neg = run_cli(&["factorize", "--input", input.to_str().unwrap(), "--rank", "1"], dir.path());
    assert_eq!(neg.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&neg.stderr).contains("row 2, column 2"), "{}", String::from_utf8_lossy(&neg.stderr));
}

#[test]
fn input_files_and_exported_fixtures_agree() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "mm"] {
        let out = dir.path().join(fmt);
        let export = binary()
            .args(["export-fixture", "--fixture", "appendix-a", "--matrix-format", fmt, "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(export.status.success());
        let file = out.join(if fmt == "csv" { "X.csv" } else { "X.mtx" });
        let from_file = run_cli(&["factorize", "--input", file.to_str().unwrap(), "--rank", "4", "--seeds", "2"], &out.join("f"));
        let from_fixture = run_cli(&["factorize", "--fixture", "appendix-a", "--rank", "4", "--seeds", "2"], &out.join("g"));
        assert!(from_file.status.success() && from_fixture.status.success());
        let results = |sub: &str| {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join(sub).join("report.json")).unwrap()).unwrap();
            v["results"].clone()
        };
        assert_eq!(results("f"), results("g"));
    }
}
