//! The benchmark commands. Each returns a deterministic report plus a
//! separate, non-deterministic timing document.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Instant;

use nmf_merge::init::initialize;
use nmf_merge::merge::{published_candidate_bound, MergeRecord};
use nmf_merge::metrics::{compare_runs, phase_plot};
use nmf_merge::pipeline::{PipelineResult, Stage, StageTimings};
use nmf_merge::solvers::{timed_solve, SolveOutcome};
use nmf_merge::{fitting_error_percent, run_pipeline, solve, DataMatrix, Factorization, InitSpec, RunTrace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// A pipeline result no worse than standard NMF by more than this many
/// percentage points counts as not worse.
pub const NOT_WORSE_BAND: f64 = 1e-6;
/// Pairs whose fitting errors differ by less than this (in percent) get
/// permutation-consistency values.
pub const PC_FIT_MISMATCH: f64 = 1e-5;
pub const TIME_RECONSTRUCTION: &str =
    "trace times are iteration x mean seconds per iteration, measured in a separate untraced run of the same solve";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    ExtraK,
    Tolerances,
    Rank,
}

impl SweepParameter {
    pub fn default_values(self, manifest: &RunManifest) -> Vec<f64> {
        match self {
            SweepParameter::ExtraK => vec![1.0, 2.0, 3.0],
            SweepParameter::Tolerances => vec![1e-1, 1e-2, 1e-3, 1e-4],
            SweepParameter::Rank => {
                let r = manifest.rank as f64;
                if r > 1.0 { vec![r - 1.0, r, r + 1.0] } else { vec![r, r + 1.0] }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: u64,
    pub method: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: Value,
    /// Per-run records flattened to CSV.
    pub csv: String,
    pub timings: Value,
    /// `(file name, CSV contents)`.
    pub traces: Vec<(String, String)>,
    pub failures: Vec<SeedFailure>,
}

fn for_seeds<T: Send>(manifest: &RunManifest, f: impl Fn(u64) -> T + Sync + Send) -> CliResult<Vec<T>> {
    if manifest.parallel <= 1 {
        return Ok(manifest.seeds.iter().map(|&s| f(s)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.parallel)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| manifest.seeds.par_iter().map(|&s| f(s)).collect()))
}

fn envelope(command: &str, manifest: &RunManifest, results: Value, failures: &[SeedFailure]) -> Value {
    let mut doc = json!({
        "command": command,
        "manifest": manifest,
        "results": results,
        "failures": failures,
    });
    if manifest.trace {
        doc["time_reconstruction"] = json!(TIME_RECONSTRUCTION);
    }
    doc
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn cell<T: Display>(v: T) -> String {
    v.to_string()
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `mean ± std` with four decimals, as in a results-table cell.
pub fn table_cell(values: &[f64]) -> String {
    let (m, s) = mean_std(values);
    format!("{m:.4} ± {s:.4}")
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) }
}

struct StandardRun {
    outcome: SolveOutcome,
    fitting_error_percent: f64,
    wall_seconds: f64,
    seconds_per_iteration: Option<f64>,
}

fn standard_run(manifest: &RunManifest, x: &DataMatrix, rank: usize, seed: u64) -> nmf_merge::Result<StandardRun> {
    let start = Instant::now();
    let f0 = initialize(x, rank, &InitSpec { kind: manifest.init, seed })?;
    let cfg = manifest.solver_config();
    let (mut outcome, seconds_per_iteration) = if cfg.trace_stride > 0 {
        let (o, spi) = timed_solve(x, &f0, &cfg)?;
        (o, Some(spi))
    } else {
        (solve(x, &f0, &cfg)?, None)
    };
    outcome.trace.stage_label = "standard".into();
    let fitting_error_percent = fitting_error_percent(x, &outcome.factors)?;
    Ok(StandardRun { outcome, fitting_error_percent, wall_seconds: start.elapsed().as_secs_f64(), seconds_per_iteration })
}

fn stage_iterations_value(res: &PipelineResult) -> Value {
    Value::Array(res.stage_iterations.iter().map(|(s, it)| json!({"stage": s, "iterations": it})).collect())
}

fn stage_timings_value(t: &StageTimings) -> Value {
    let mut v = serde_json::to_value(t).expect("plain struct");
    v["total"] = json!(t.total());
    v
}

fn iterations_of(res: &PipelineResult, stage: Stage) -> usize {
    res.stage_iterations.iter().filter(|(s, _)| *s == stage).map(|(_, it)| it).sum()
}

fn trace_csv(traces: &[RunTrace]) -> String {
    let rows: Vec<Vec<String>> = traces
        .iter()
        .flat_map(|t| {
            t.samples.iter().map(move |s| {
                vec![t.stage_label.clone(), cell(s.iteration), cell(s.elapsed_seconds), cell(s.objective)]
            })
        })
        .collect();
    csv_table(&["stage", "iteration", "time", "objective"], &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeRecord {
    pub seed: u64,
    pub fitting_error_percent: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn factorize(manifest: &RunManifest, x: &DataMatrix) -> CliResult<CommandOutput> {
    let runs = for_seeds(manifest, |seed| (seed, standard_run(manifest, x, manifest.rank, seed)))?;
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (seed, run) in runs {
        match run {
            Ok(run) => {
                records.push(FactorizeRecord {
                    seed,
                    fitting_error_percent: run.fitting_error_percent,
                    iterations: run.outcome.iterations,
                    converged: run.outcome.converged,
                });
                timings.push(json!({
                    "seed": seed,
                    "wall_seconds": run.wall_seconds,
                    "seconds_per_iteration": run.seconds_per_iteration,
                }));
                if manifest.trace {
                    traces.push((format!("factorize_seed{seed}.csv"), trace_csv(&[run.outcome.trace])));
                }
            }
            Err(e) => failures.push(SeedFailure { seed, method: "standard".into(), error: e.to_string() }),
        }
    }
    let errors: Vec<f64> = records.iter().map(|r| r.fitting_error_percent).collect();
    let (mean, std) = mean_std(&errors);
    let results = json!({
        "runs": records,
        "summary": {"mean_fitting_error_percent": mean, "std_fitting_error_percent": std, "cell": table_cell(&errors)},
    });
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![cell(r.seed), cell(r.fitting_error_percent), cell(r.iterations), cell(r.converged)])
        .collect();
    Ok(CommandOutput {
        report: envelope("factorize", manifest, results, &failures),
        csv: csv_table(&["seed", "fitting_error_percent", "iterations", "converged"], &rows),
        timings: json!({"runs": timings}),
        traces,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub seed: u64,
    pub fitting_error_percent: f64,
    pub initial_fitting_error_percent: f64,
    pub stage_iterations: Value,
    pub merge_evaluations: usize,
    pub published_candidate_bound: i64,
    pub merge_log: Vec<MergeRecord>,
}

fn pipeline_record(seed: u64, res: &PipelineResult, manifest: &RunManifest) -> PipelineRecord {
    PipelineRecord {
        seed,
        fitting_error_percent: res.fitting_error_percent,
        initial_fitting_error_percent: res.initial_fitting_error_percent,
        stage_iterations: stage_iterations_value(res),
        merge_evaluations: res.merge_evaluations,
        published_candidate_bound: published_candidate_bound(manifest.rank + manifest.extra_k, manifest.rank),
        merge_log: res.merge_log.clone(),
    }
}

pub fn pipeline(manifest: &RunManifest, x: &DataMatrix) -> CliResult<CommandOutput> {
    let runs = for_seeds(manifest, |seed| (seed, run_pipeline(x, &manifest.pipeline_config(seed))))?;
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (seed, run) in runs {
        match run {
            Ok(res) => {
                records.push(pipeline_record(seed, &res, manifest));
                let mut t = stage_timings_value(&res.stage_timings);
                t["seed"] = json!(seed);
                timings.push(t);
                if manifest.trace {
                    traces.push((format!("pipeline_seed{seed}.csv"), trace_csv(&res.stage_traces)));
                }
            }
            Err(e) => failures.push(SeedFailure {
                seed,
                method: "pipeline".into(),
                error: format!("{e}; partial stage timings {:?}", e.partial_timings.as_array()),
            }),
        }
    }
    let errors: Vec<f64> = records.iter().map(|r| r.fitting_error_percent).collect();
    let results = json!({"runs": records, "summary": {"cell": table_cell(&errors)}});
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                cell(r.seed),
                cell(r.fitting_error_percent),
                cell(r.initial_fitting_error_percent),
                cell(r.merge_log.len()),
                cell(r.merge_evaluations),
            ]
        })
        .collect();
    Ok(CommandOutput {
        report: envelope("pipeline", manifest, results, &failures),
        csv: csv_table(
            &["seed", "fitting_error_percent", "initial_fitting_error_percent", "merges", "merge_evaluations"],
            &rows,
        ),
        timings: json!({"columns": StageTimings::COLUMNS, "runs": timings}),
        traces,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePair {
    pub seed: u64,
    pub standard_fitting_error_percent: f64,
    pub pipeline_fitting_error_percent: f64,
    /// Signed distance from the diagonal of the paired scatter plot;
    /// positive when the pipeline is better.
    pub diagonal_distance: f64,
    pub pipeline_not_worse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub seeds: usize,
    pub pipeline_not_worse: usize,
    pub pipeline_strictly_better: usize,
    pub standard_cell: String,
    pub pipeline_cell: String,
}

pub fn compare_pair(seed: u64, standard: f64, pipeline: f64) -> ComparePair {
    ComparePair {
        seed,
        standard_fitting_error_percent: standard,
        pipeline_fitting_error_percent: pipeline,
        diagonal_distance: (standard - pipeline) / std::f64::consts::SQRT_2,
        pipeline_not_worse: pipeline <= standard + NOT_WORSE_BAND,
    }
}

pub fn summarize_pairs(pairs: &[ComparePair]) -> CompareSummary {
    let std_errors: Vec<f64> = pairs.iter().map(|p| p.standard_fitting_error_percent).collect();
    let pipe_errors: Vec<f64> = pairs.iter().map(|p| p.pipeline_fitting_error_percent).collect();
    CompareSummary {
        seeds: pairs.len(),
        pipeline_not_worse: pairs.iter().filter(|p| p.pipeline_not_worse).count(),
        pipeline_strictly_better: pairs
            .iter()
            .filter(|p| p.pipeline_fitting_error_percent < p.standard_fitting_error_percent - NOT_WORSE_BAND)
            .count(),
        standard_cell: table_cell(&std_errors),
        pipeline_cell: table_cell(&pipe_errors),
    }
}

type PairedRun = (StandardRun, PipelineResult);

fn paired_run(manifest: &RunManifest, x: &DataMatrix, seed: u64) -> Result<PairedRun, SeedFailure> {
    let fail = |method: &str, e: String| SeedFailure { seed, method: method.into(), error: e };
    let standard = standard_run(manifest, x, manifest.rank, seed).map_err(|e| fail("standard", e.to_string()))?;
    let pipe = run_pipeline(x, &manifest.pipeline_config(seed)).map_err(|e| fail("pipeline", e.to_string()))?;
    Ok((standard, pipe))
}

pub fn compare(manifest: &RunManifest, x: &DataMatrix) -> CliResult<CommandOutput> {
    let runs = for_seeds(manifest, |seed| (seed, paired_run(manifest, x, seed)))?;
    let mut pairs = Vec::new();
    let mut timings = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (seed, run) in runs {
        match run {
            Ok((standard, pipe)) => {
                pairs.push(compare_pair(seed, standard.fitting_error_percent, pipe.fitting_error_percent));
                timings.push(json!({
                    "seed": seed,
                    "standard_seconds": standard.wall_seconds,
                    "pipeline": stage_timings_value(&pipe.stage_timings),
                }));
                if manifest.trace {
                    let points = phase_plot(std::slice::from_ref(&standard.outcome.trace), &pipe.stage_traces);
                    let rows: Vec<Vec<String>> =
                        points.iter().map(|p| vec![cell(p.time), cell(p.first), cell(p.second)]).collect();
                    traces.push((format!("phase_seed{seed}.csv"), csv_table(&["time", "standard", "pipeline"], &rows)));
                }
            }
            Err(f) => failures.push(f),
        }
    }
    let summary = summarize_pairs(&pairs);
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|p| {
            vec![
                cell(p.seed),
                cell(p.standard_fitting_error_percent),
                cell(p.pipeline_fitting_error_percent),
                cell(p.diagonal_distance),
                cell(p.pipeline_not_worse),
            ]
        })
        .collect();
    Ok(CommandOutput {
        report: envelope("compare", manifest, json!({"pairs": pairs, "summary": summary}), &failures),
        csv: csv_table(
            &["seed", "standard_fitting_error_percent", "pipeline_fitting_error_percent", "diagonal_distance", "pipeline_not_worse"],
            &rows,
        ),
        timings: json!({"runs": timings}),
        traces,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyPair {
    pub method: String,
    pub seed_a: u64,
    pub seed_b: u64,
    pub subspace_d: f64,
    pub fit_error_delta: f64,
    /// Present only when the fitting errors agree within [`PC_FIT_MISMATCH`].
    pub pc_r1: Option<f64>,
    pub pc_r2: Option<f64>,
}

fn all_pairs(
    method: &str,
    x: &DataMatrix,
    runs: &[(u64, Factorization)],
) -> CliResult<Vec<ConsistencyPair>> {
    let mut out = Vec::new();
    for (i, (sa, fa)) in runs.iter().enumerate() {
        for (sb, fb) in &runs[i + 1..] {
            let rep = compare_runs(x, fa, fb)?;
            let close = rep.fit_error_delta.abs() < PC_FIT_MISMATCH;
            out.push(ConsistencyPair {
                method: method.into(),
                seed_a: *sa,
                seed_b: *sb,
                subspace_d: rep.subspace_d,
                fit_error_delta: rep.fit_error_delta,
                pc_r1: close.then_some(rep.pc_r1),
                pc_r2: close.then_some(rep.pc_r2),
            });
        }
    }
    Ok(out)
}

pub fn consistency(manifest: &RunManifest, x: &DataMatrix) -> CliResult<CommandOutput> {
    let runs = for_seeds(manifest, |seed| (seed, paired_run(manifest, x, seed)))?;
    let mut standard = Vec::new();
    let mut merged = Vec::new();
    let mut failures = Vec::new();
    for (seed, run) in runs {
        match run {
            Ok((s, p)) => {
                standard.push((seed, s.outcome.factors));
                merged.push((seed, p.final_factors));
            }
            Err(f) => failures.push(f),
        }
    }
    let mut pairs = all_pairs("standard", x, &standard)?;
    pairs.extend(all_pairs("pipeline", x, &merged)?);

    let mut summary = BTreeMap::new();
    for method in ["standard", "pipeline"] {
        let d: Vec<f64> = pairs.iter().filter(|p| p.method == method).map(|p| p.subspace_d).collect();
        let with_pc = pairs.iter().filter(|p| p.method == method && p.pc_r1.is_some()).count();
        summary.insert(
            method,
            json!({"pairs": d.len(), "mean_subspace_d": mean_std(&d).0, "median_subspace_d": median(&d), "pairs_with_pc": with_pc}),
        );
    }
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|p| {
            vec![
                p.method.clone(),
                cell(p.seed_a),
                cell(p.seed_b),
                cell(p.subspace_d),
                cell(p.fit_error_delta),
                opt_cell(p.pc_r1),
                opt_cell(p.pc_r2),
            ]
        })
        .collect();
    Ok(CommandOutput {
        report: envelope("consistency", manifest, json!({"pairs": pairs, "summary": summary}), &failures),
        csv: csv_table(&["method", "seed_a", "seed_b", "subspace_d", "fit_error_delta", "pc_r1", "pc_r2"], &rows),
        timings: json!({}),
        traces: Vec::new(),
        failures,
    })
}

fn as_count(v: f64, what: &str) -> CliResult<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(CliError::Usage(format!("{what} values must be positive integers, got {v}")))
    }
}

fn with_value(manifest: &RunManifest, param: SweepParameter, v: f64) -> CliResult<RunManifest> {
    let mut m = manifest.clone();
    match param {
        SweepParameter::ExtraK => m.extra_k = as_count(v, "extra_k")?,
        SweepParameter::Tolerances => {
            if v.is_nan() || v <= 0.0 {
                return Err(CliError::Usage(format!("tolerance values must be positive, got {v}")));
            }
            m.eps_initial = v;
            m.eps_overcomplete = v;
        }
        SweepParameter::Rank => m.rank = as_count(v, "rank")?,
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub seed: u64,
    pub standard_fitting_error_percent: f64,
    pub pipeline_fitting_error_percent: f64,
    /// Standard minus pipeline.
    pub difference: f64,
    pub initial_iterations: usize,
    pub overcomplete_iterations: usize,
    pub final_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGroup {
    pub value: f64,
    pub cells: Vec<SweepCell>,
    pub median_standard: f64,
    pub median_pipeline: f64,
    pub mean_difference: f64,
    pub median_difference: f64,
}

/// Grid over one parameter: `eps_initial = eps_overcomplete` for the
/// tolerance sweep, the target rank, or the number of extra components.
pub fn sweep(manifest: &RunManifest, x: &DataMatrix, param: SweepParameter, values: &[f64]) -> CliResult<CommandOutput> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    let mut groups = Vec::new();
    let mut timings = Vec::new();
    let mut failures = Vec::new();
    let mut standard_cache: BTreeMap<(usize, u64), Result<f64, String>> = BTreeMap::new();
    for &v in values {
        let m = with_value(manifest, param, v)?;
        let runs = for_seeds(&m, |seed| {
            let std = if standard_cache.contains_key(&(m.rank, seed)) {
                None
            } else {
                Some(standard_run(&m, x, m.rank, seed).map(|r| (r.fitting_error_percent, r.wall_seconds)))
            };
            (seed, std, run_pipeline(x, &m.pipeline_config(seed)))
        })?;
        let mut cells = Vec::new();
        for (seed, std, pipe) in runs {
            if let Some(std) = std {
                let entry = std.map(|(fe, secs)| {
                    timings.push(json!({"value": v, "seed": seed, "standard_seconds": secs}));
                    fe
                });
                standard_cache.insert((m.rank, seed), entry.map_err(|e| e.to_string()));
            }
            let label = |method: &str| format!("{method}[{}={v}]", sweep_name(param));
            let std_fe = match &standard_cache[&(m.rank, seed)] {
                Ok(fe) => *fe,
                Err(e) => {
                    failures.push(SeedFailure { seed, method: label("standard"), error: e.clone() });
                    continue;
                }
            };
            match pipe {
                Ok(res) => {
                    let mut t = stage_timings_value(&res.stage_timings);
                    t["value"] = json!(v);
                    t["seed"] = json!(seed);
                    timings.push(t);
                    cells.push(SweepCell {
                        seed,
                        standard_fitting_error_percent: std_fe,
                        pipeline_fitting_error_percent: res.fitting_error_percent,
                        difference: std_fe - res.fitting_error_percent,
                        initial_iterations: iterations_of(&res, Stage::InitialNmf),
                        overcomplete_iterations: iterations_of(&res, Stage::OvercompleteNmf),
                        final_iterations: iterations_of(&res, Stage::FinalNmf),
                    });
                }
                Err(e) => failures.push(SeedFailure { seed, method: label("pipeline"), error: e.to_string() }),
            }
        }
        let col = |f: fn(&SweepCell) -> f64| cells.iter().map(f).collect::<Vec<f64>>();
        let diffs = col(|c| c.difference);
        groups.push(SweepGroup {
            value: v,
            median_standard: median(&col(|c| c.standard_fitting_error_percent)),
            median_pipeline: median(&col(|c| c.pipeline_fitting_error_percent)),
            mean_difference: mean_std(&diffs).0,
            median_difference: median(&diffs),
            cells,
        });
    }
    let rows: Vec<Vec<String>> = groups
        .iter()
        .flat_map(|g| {
            g.cells.iter().map(move |c| {
                vec![
                    cell(g.value),
                    cell(c.seed),
                    cell(c.standard_fitting_error_percent),
                    cell(c.pipeline_fitting_error_percent),
                    cell(c.difference),
                    cell(c.initial_iterations),
                    cell(c.overcomplete_iterations),
                    cell(c.final_iterations),
                ]
            })
        })
        .collect();
    let results = json!({
        "parameter": param,
        "groups": groups,
        "stage_timing_columns": StageTimings::COLUMNS,
        "stage_timings_file": crate::TIMINGS_FILE,
    });
    Ok(CommandOutput {
        report: envelope("sweep", manifest, results, &failures),
        csv: csv_table(
            &[
                "value",
                "seed",
                "standard_fitting_error_percent",
                "pipeline_fitting_error_percent",
                "difference",
                "initial_iterations",
                "overcomplete_iterations",
                "final_iterations",
            ],
            &rows,
        ),
        timings: json!({"columns": StageTimings::COLUMNS, "runs": timings}),
        traces: Vec::new(),
        failures,
    })
}

fn sweep_name(param: SweepParameter) -> &'static str {
    match param {
        SweepParameter::ExtraK => "extra_k",
        SweepParameter::Tolerances => "eps1=eps2",
        SweepParameter::Rank => "rank",
    }
}
