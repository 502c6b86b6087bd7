//! The multistage pipeline: initial NMF, feature recovery, over-complete
//! NMF, greedy merge back to the target rank, and a final NMF polish.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{NmfError, Result};
use crate::init::{initialize, InitSpec};
use crate::matrix::{DataMatrix, Factorization};
use crate::merge::{greedy_merge, normalize_columns, MergeRecord};
use crate::recovery::{default_extra_components, recover_components, RecoverySpec, RecoveryStrategy};
use crate::solvers::{fitting_error_percent, solve, timed_solve, Algorithm, RunTrace, SolveOutcome, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub target_rank: usize,
    pub extra_k: usize,
    pub eps_initial: f64,
    pub eps_overcomplete: f64,
    pub eps_final: f64,
    pub algorithm: Algorithm,
    pub init: InitSpec,
    pub max_iterations: usize,
    /// Rank of the initial NMF; `None` uses the target rank.
    pub initial_rank: Option<usize>,
    pub recovery: RecoveryStrategy,
    /// Recovery + over-complete NMF repetitions, each adding `extra_k`
    /// components.
    pub recovery_rounds: usize,
    /// Objective sampling stride for stage traces; 0 disables traces.
    pub trace_stride: usize,
}

impl PipelineConfig {
    pub fn new(target_rank: usize) -> Self {
        Self {
            target_rank,
            extra_k: default_extra_components(target_rank),
            eps_initial: 1e-2,
            eps_overcomplete: 1e-2,
            eps_final: 1e-4,
            algorithm: Algorithm::Hals,
            init: InitSpec::default(),
            max_iterations: 1_000_000,
            initial_rank: None,
            recovery: RecoveryStrategy::ResidualSvd,
            recovery_rounds: 1,
            trace_stride: 0,
        }
    }

    pub fn initial_rank(&self) -> usize {
        self.initial_rank.unwrap_or(self.target_rank)
    }

    pub fn overcomplete_rank(&self) -> usize {
        self.initial_rank() + self.extra_k * self.recovery_rounds
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_rank == 0 {
            return Err(NmfError::Config("target rank must be positive".into()));
        }
        if self.extra_k == 0 || self.recovery_rounds == 0 {
            return Err(NmfError::Config("extra_k and recovery_rounds must be positive".into()));
        }
        if self.initial_rank() == 0 {
            return Err(NmfError::Config("initial rank must be positive".into()));
        }
        if self.overcomplete_rank() < self.target_rank {
            return Err(NmfError::Rank("over-complete rank below target rank".into()));
        }
        for (name, eps) in [
            ("eps_initial", self.eps_initial),
            ("eps_overcomplete", self.eps_overcomplete),
            ("eps_final", self.eps_final),
        ] {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(NmfError::Config(format!("{name} must be positive, got {eps}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(NmfError::Config("max_iterations must be at least 1".into()));
        }
        if self.eps_initial < self.eps_final || self.eps_overcomplete < self.eps_final {
            log::warn!(
                "intermediate tolerances ({}, {}) are stricter than the final tolerance {}",
                self.eps_initial,
                self.eps_overcomplete,
                self.eps_final
            );
        }
        Ok(())
    }

    fn solver(&self, epsilon: f64) -> SolverConfig {
        SolverConfig {
            algorithm: self.algorithm,
            epsilon,
            max_iterations: self.max_iterations,
            trace_stride: self.trace_stride,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    InitialNmf,
    FeatureRecovery,
    OvercompleteNmf,
    Merge,
    FinalNmf,
}

/// Wall seconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub initial_nmf: f64,
    pub feature_recovery: f64,
    pub overcomplete_nmf: f64,
    pub merge: f64,
    pub final_nmf: f64,
}

impl StageTimings {
    pub const COLUMNS: [&'static str; 5] =
        ["initial_nmf", "feature_recovery", "overcomplete_nmf", "merge", "final_nmf"];

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.initial_nmf, self.feature_recovery, self.overcomplete_nmf, self.merge, self.final_nmf]
    }

    fn add(&mut self, stage: Stage, seconds: f64) {
        let slot = match stage {
            Stage::InitialNmf => &mut self.initial_nmf,
            Stage::FeatureRecovery => &mut self.feature_recovery,
            Stage::OvercompleteNmf => &mut self.overcomplete_nmf,
            Stage::Merge => &mut self.merge,
            Stage::FinalNmf => &mut self.final_nmf,
        };
        *slot += seconds;
    }
}

/// Which factorization [`improve_existing`] returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Merged,
    RepolishedInput,
    Input,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub final_factors: Factorization,
    pub stage_traces: Vec<RunTrace>,
    pub stage_timings: StageTimings,
    pub merge_log: Vec<MergeRecord>,
    pub merge_evaluations: usize,
    pub fitting_error_percent: f64,
    /// Fitting error of the initial-stage factors.
    pub initial_fitting_error_percent: f64,
    /// Sweeps per NMF stage, in execution order.
    pub stage_iterations: Vec<(Stage, usize)>,
    pub selection: Selection,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("pipeline failed during {stage:?}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: NmfError,
    /// Timings of the stages that completed.
    pub partial_timings: StageTimings,
}

struct Run<'a> {
    x: &'a DataMatrix,
    cfg: &'a PipelineConfig,
    timings: StageTimings,
    traces: Vec<RunTrace>,
    iterations: Vec<(Stage, usize)>,
    clock: f64,
}

impl<'a> Run<'a> {
    fn new(x: &'a DataMatrix, cfg: &'a PipelineConfig) -> Self {
        Self { x, cfg, timings: StageTimings::default(), traces: Vec::new(), iterations: Vec::new(), clock: 0.0 }
    }

    fn fail(&self, stage: Stage, source: NmfError) -> PipelineError {
        PipelineError { stage, source, partial_timings: self.timings }
    }

    fn timed<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> std::result::Result<T, PipelineError> {
        let start = Instant::now();
        let out = f().map_err(|e| self.fail(stage, e))?;
        let secs = start.elapsed().as_secs_f64();
        self.timings.add(stage, secs);
        self.clock += secs;
        Ok(out)
    }

    fn nmf(&mut self, stage: Stage, label: &str, f0: &Factorization, epsilon: f64) -> std::result::Result<Factorization, PipelineError> {
        let solver = self.cfg.solver(epsilon);
        let outcome: SolveOutcome = if self.cfg.trace_stride > 0 {
            // Stage time comes from the untraced timing run.
            let (mut outcome, per_iter) = timed_solve(self.x, f0, &solver).map_err(|e| self.fail(stage, e))?;
            let secs = per_iter * outcome.iterations as f64;
            for s in &mut outcome.trace.samples {
                s.elapsed_seconds += self.clock;
            }
            outcome.trace.stage_label = label.to_string();
            self.timings.add(stage, secs);
            self.clock += secs;
            self.traces.push(outcome.trace.clone());
            outcome
        } else {
            let x = self.x;
            self.timed(stage, || solve(x, f0, &solver))?
        };
        self.iterations.push((stage, outcome.iterations));
        Ok(outcome.factors)
    }

    /// Recovery, over-complete NMF, merge and final NMF from `initial`.
    fn improve(mut self, initial: Factorization) -> std::result::Result<PipelineResult, PipelineError> {
        let x = self.x;
        let cfg = self.cfg;
        let initial_fe = fitting_error_percent(x, &initial).map_err(|e| self.fail(Stage::InitialNmf, e))?;

        let mut current = initial;
        for round in 0..cfg.recovery_rounds {
            let spec = RecoverySpec {
                k: cfg.extra_k,
                strategy: cfg.recovery,
                seed: cfg.init.seed.wrapping_add(round as u64),
                allow_overcomplete: false,
            };
            let prev = current;
            current = self.timed(Stage::FeatureRecovery, || recover_components(x, &prev, &spec))?;
            current = self.nmf(Stage::OvercompleteNmf, "overcomplete", &current, cfg.eps_overcomplete)?;
        }

        let target = cfg.target_rank;
        let over = current;
        let merged = self.timed(Stage::Merge, || greedy_merge(&normalize_columns(&over), target))?;
        let merged_factors = merged.factors.into_factorization();

        let final_factors = self.nmf(Stage::FinalNmf, "final", &merged_factors, cfg.eps_final)?;
        let fe = fitting_error_percent(x, &final_factors).map_err(|e| self.fail(Stage::FinalNmf, e))?;

        Ok(PipelineResult {
            final_factors,
            stage_traces: self.traces,
            stage_timings: self.timings,
            merge_log: merged.log,
            merge_evaluations: merged.evaluations,
            fitting_error_percent: fe,
            initial_fitting_error_percent: initial_fe,
            stage_iterations: self.iterations,
            selection: Selection::Merged,
        })
    }
}

fn check_ranks(x: &DataMatrix, cfg: &PipelineConfig) -> Result<()> {
    cfg.validate()?;
    let limit = x.rows().min(x.cols());
    if cfg.overcomplete_rank() > limit {
        return Err(NmfError::Rank(format!(
            "over-complete rank {} exceeds min(m, n) = {limit}",
            cfg.overcomplete_rank()
        )));
    }
    Ok(())
}

/// Runs all five stages from the configured initialization.
pub fn run_pipeline(x: &DataMatrix, cfg: &PipelineConfig) -> std::result::Result<PipelineResult, PipelineError> {
    let mut run = Run::new(x, cfg);
    check_ranks(x, cfg).map_err(|e| run.fail(Stage::InitialNmf, e))?;
    let f0 = initialize(x, cfg.initial_rank(), &cfg.init).map_err(|e| run.fail(Stage::InitialNmf, e))?;
    let initial = run.nmf(Stage::InitialNmf, "initial", &f0, cfg.eps_initial)?;
    run.improve(initial)
}

/// Same as [`run_pipeline`] from a fixed initial factorization (which can
/// come from any NMF run), skipping the initial NMF stage.
pub fn run_pipeline_from(
    x: &DataMatrix,
    initial: &Factorization,
    cfg: &PipelineConfig,
) -> std::result::Result<PipelineResult, PipelineError> {
    let run = Run::new(x, cfg);
    check_ranks(x, cfg).map_err(|e| run.fail(Stage::InitialNmf, e))?;
    if initial.rank() != cfg.initial_rank() {
        return Err(run.fail(
            Stage::InitialNmf,
            NmfError::Rank(format!("initial factorization has rank {}, expected {}", initial.rank(), cfg.initial_rank())),
        ));
    }
    initial.check_compatible(x).map_err(|e| run.fail(Stage::InitialNmf, e))?;
    run.improve(initial.clone())
}

/// Improves an existing rank-`target_rank` solution. If the merged result
/// polishes to a worse fit than the input, the better of the merged result
/// and the input re-polished at `eps_final` is returned instead.
pub fn improve_existing(
    x: &DataMatrix,
    existing: &Factorization,
    cfg: &PipelineConfig,
) -> std::result::Result<PipelineResult, PipelineError> {
    if existing.rank() != cfg.target_rank {
        let run = Run::new(x, cfg);
        return Err(run.fail(
            Stage::InitialNmf,
            NmfError::Rank(format!("existing solution has rank {}, expected {}", existing.rank(), cfg.target_rank)),
        ));
    }
    let cfg_fixed = PipelineConfig { initial_rank: None, ..*cfg };
    let mut result = run_pipeline_from(x, existing, &cfg_fixed)?;
    let fail = |timings: StageTimings| move |e| PipelineError { stage: Stage::FinalNmf, source: e, partial_timings: timings };
    let input_fe = fitting_error_percent(x, existing).map_err(fail(result.stage_timings))?;
    if result.fitting_error_percent <= input_fe {
        return Ok(result);
    }

    let start = Instant::now();
    let repolished =
        solve(x, existing, &cfg_fixed.solver(cfg_fixed.eps_final)).map_err(fail(result.stage_timings))?;
    result.stage_timings.final_nmf += start.elapsed().as_secs_f64();
    let repolished_fe = fitting_error_percent(x, &repolished.factors).map_err(fail(result.stage_timings))?;
    if repolished_fe < result.fitting_error_percent {
        if repolished_fe <= input_fe {
            result.final_factors = repolished.factors;
            result.fitting_error_percent = repolished_fe;
            result.selection = Selection::RepolishedInput;
        } else {
            result.final_factors = existing.clone();
            result.fitting_error_percent = input_fe;
            result.selection = Selection::Input;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn rank_one() -> DataMatrix {
        let u = array![1.0, 2.0, 0.5, 1.5];
        let v = array![0.2, 3.0, 1.0, 4.0, 2.0];
        DataMatrix::new(Array2::from_shape_fn((4, 5), |(i, j)| u[i] * v[j])).unwrap()
    }

    #[test]
    fn defaults_follow_recommended_tolerances() {
        let cfg = PipelineConfig::new(17);
        assert_eq!(cfg.extra_k, 4);
        assert_eq!((cfg.eps_initial, cfg.eps_overcomplete, cfg.eps_final), (1e-2, 1e-2, 1e-4));
        assert_eq!(cfg.overcomplete_rank(), 21);
    }

    #[test]
    fn rank_one_pipeline_is_exact() {
        let x = rank_one();
        let mut cfg = PipelineConfig::new(1);
        cfg.eps_final = 1e-12;
        let res = run_pipeline(&x, &cfg).unwrap();
        assert_eq!(res.final_factors.rank(), 1);
        assert_eq!(res.merge_log.len(), 1);
        assert!(res.fitting_error_percent < 1e-8, "{}", res.fitting_error_percent);
    }

    #[test]
    fn overcomplete_rank_limit() {
        let x = rank_one();
        let cfg = PipelineConfig { extra_k: 1, ..PipelineConfig::new(4) };
        let err = run_pipeline(&x, &cfg).unwrap_err();
        assert!(matches!(err.source, NmfError::Rank(_)));
        assert_eq!(err.partial_timings, StageTimings::default());
    }

    #[test]
    fn improve_existing_rank_mismatch() {
        let x = rank_one();
        let f = Factorization::new(Array2::ones((4, 2)), Array2::ones((2, 5))).unwrap();
        let err = improve_existing(&x, &f, &PipelineConfig::new(1)).unwrap_err();
        assert!(matches!(err.source, NmfError::Rank(_)));
    }

    #[test]
    fn traces_cover_three_nmf_stages() {
        let x = rank_one();
        let cfg = PipelineConfig { trace_stride: 1, ..PipelineConfig::new(2) };
        let res = run_pipeline(&x, &cfg).unwrap();
        let labels: Vec<&str> = res.stage_traces.iter().map(|t| t.stage_label.as_str()).collect();
        assert_eq!(labels, ["initial", "overcomplete", "final"]);
        let times: Vec<f64> = res.stage_traces.iter().flat_map(|t| t.samples.iter().map(|s| s.elapsed_seconds)).collect();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
    }
}
