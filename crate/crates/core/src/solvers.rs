//! Iterative NMF solvers (HALS and multiplicative updates) under the
//! squared-Frobenius objective, with the per-component relative-change
//! stopping rule and objective traces.

use std::time::Instant;

use ndarray::{ArrayView1, ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{NmfError, Result};
use crate::matrix::{DataMatrix, Factorization};

/// Added to every multiplicative-update denominator.
pub const MU_DENOMINATOR_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Hals,
    Mu,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Hals => f.write_str("hals"),
            Algorithm::Mu => f.write_str("mu"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Relative-change tolerance of the stopping rule.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Record the objective every `trace_stride` sweeps; 0 disables tracing.
    pub trace_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Hals,
            epsilon: 1e-4,
            max_iterations: 1_000_000,
            trace_stride: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(NmfError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(NmfError::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub iteration: usize,
    pub elapsed_seconds: f64,
    pub objective: f64,
}

/// Objective samples of one solver run.
///
/// Samples are recorded by iteration; `elapsed_seconds` stays zero until
/// [`RunTrace::reconstruct_time`] assigns iteration x mean-iteration-time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub stage_label: String,
    pub samples: Vec<TraceSample>,
}

impl RunTrace {
    pub fn new(stage_label: impl Into<String>) -> Self {
        Self { stage_label: stage_label.into(), samples: Vec::new() }
    }

    fn push(&mut self, iteration: usize, objective: f64) {
        debug_assert!(self.samples.last().is_none_or(|s| s.iteration < iteration));
        self.samples.push(TraceSample { iteration, elapsed_seconds: 0.0, objective });
    }

    pub fn reconstruct_time(&mut self, seconds_per_iteration: f64) {
        for s in &mut self.samples {
            s.elapsed_seconds = s.iteration as f64 * seconds_per_iteration;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub factors: Factorization,
    pub trace: RunTrace,
    pub iterations: usize,
    pub converged: bool,
}

fn residual_squared_norm(x: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>, h: ArrayView2<'_, f64>) -> f64 {
    let wh = w.dot(&h);
    Zip::from(x).and(&wh).fold(0.0, |acc, &a, &b| {
        let d = a - b;
        acc + d * d
    })
}

/// Half the squared Frobenius distance between `X` and `W H`.
pub fn objective(x: &DataMatrix, f: &Factorization) -> Result<f64> {
    f.check_compatible(x)?;
    Ok(0.5 * residual_squared_norm(x.values(), f.w(), f.h()))
}

/// Percent of data energy left unexplained: `100 ||X - WH||^2 / ||X||^2`.
pub fn fitting_error_percent(x: &DataMatrix, f: &Factorization) -> Result<f64> {
    f.check_compatible(x)?;
    let denom = x.squared_norm();
    if denom <= 0.0 {
        return Err(NmfError::Domain("fitting error undefined for an all-zero data matrix".into()));
    }
    Ok(100.0 * residual_squared_norm(x.values(), f.w(), f.h()) / denom)
}

// Block coordinate update of every W column, then every H row. A component
// whose partner has zero energy has an undefined update and is left as is.
fn hals_update(x: ArrayView2<'_, f64>, f: &mut Factorization) {
    let (w, h) = f.parts_mut();
    let r = w.ncols();

    let xht = x.dot(&h.t());
    let hht = h.dot(&h.t());
    for j in 0..r {
        let d = hht[[j, j]];
        if d <= 0.0 {
            continue;
        }
        let grad = &xht.column(j) - &w.dot(&hht.column(j));
        let mut col = w.column_mut(j);
        Zip::from(&mut col).and(&grad).for_each(|wv, &g| *wv = (*wv + g / d).max(0.0));
    }

    let wtx = w.t().dot(&x);
    let wtw = w.t().dot(&*w);
    for j in 0..r {
        let d = wtw[[j, j]];
        if d <= 0.0 {
            continue;
        }
        let grad = &wtx.row(j) - &wtw.row(j).dot(&*h);
        let mut row = h.row_mut(j);
        Zip::from(&mut row).and(&grad).for_each(|hv, &g| *hv = (*hv + g / d).max(0.0));
    }
}

fn mu_update(x: ArrayView2<'_, f64>, f: &mut Factorization) {
    let (w, h) = f.parts_mut();

    let numer = w.t().dot(&x);
    let denom = w.t().dot(&*w).dot(&*h);
    Zip::from(&mut *h)
        .and(&numer)
        .and(&denom)
        .for_each(|hv, &a, &b| *hv *= a / (b + MU_DENOMINATOR_GUARD));

    let numer = x.dot(&h.t());
    let denom = w.dot(&h.dot(&h.t()));
    Zip::from(&mut *w)
        .and(&numer)
        .and(&denom)
        .for_each(|wv, &a, &b| *wv *= a / (b + MU_DENOMINATOR_GUARD));
}

fn sweep_in_place(algorithm: Algorithm, x: ArrayView2<'_, f64>, f: &mut Factorization) {
    match algorithm {
        Algorithm::Hals => hals_update(x, f),
        Algorithm::Mu => mu_update(x, f),
    }
}

/// One HALS sweep over all components.
pub fn hals_sweep(x: &DataMatrix, f: &Factorization) -> Result<Factorization> {
    f.check_compatible(x)?;
    let mut next = f.clone();
    hals_update(x.values(), &mut next);
    Ok(next)
}

/// One multiplicative update of `H` followed by `W`.
pub fn mu_sweep(x: &DataMatrix, f: &Factorization) -> Result<Factorization> {
    f.check_compatible(x)?;
    let mut next = f.clone();
    mu_update(x.values(), &mut next);
    Ok(next)
}

fn vector_converged(prev: ArrayView1<'_, f64>, next: ArrayView1<'_, f64>, epsilon: f64) -> bool {
    let (diff, sum) = prev.iter().zip(next.iter()).fold((0.0, 0.0), |(d, s), (&a, &b)| {
        (d + (b - a) * (b - a), s + (b + a) * (b + a))
    });
    // both zero: 0 <= 0
    diff <= epsilon * sum
}

/// True when every column of `W` and every row of `H` satisfies
/// `||v_next - v_prev||^2 <= epsilon ||v_next + v_prev||^2`.
pub fn converged(prev: &Factorization, next: &Factorization, epsilon: f64) -> bool {
    assert_eq!(prev.w().dim(), next.w().dim(), "W shapes differ");
    assert_eq!(prev.h().dim(), next.h().dim(), "H shapes differ");
    (0..prev.rank()).all(|j| {
        vector_converged(prev.w_column(j), next.w_column(j), epsilon)
            && vector_converged(prev.h_row(j), next.h_row(j), epsilon)
    })
}

/// Sweeps until [`converged`] holds or `max_iterations` is reached.
pub fn solve(x: &DataMatrix, f0: &Factorization, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    f0.check_compatible(x)?;
    let xv = x.values();
    let mut trace = RunTrace::new("nmf");
    let tracing = cfg.trace_stride > 0;
    if tracing {
        trace.push(0, 0.5 * residual_squared_norm(xv, f0.w(), f0.h()));
    }

    let mut current = f0.clone();
    let mut iterations = 0;
    let mut done = false;
    while iterations < cfg.max_iterations {
        let prev = current.clone();
        sweep_in_place(cfg.algorithm, xv, &mut current);
        iterations += 1;
        done = converged(&prev, &current, cfg.epsilon);
        let last = done || iterations == cfg.max_iterations;
        if tracing && (iterations % cfg.trace_stride == 0 || last) {
            trace.push(iterations, 0.5 * residual_squared_norm(xv, current.w(), current.h()));
        }
        if done {
            break;
        }
    }

    Ok(SolveOutcome { factors: current, trace, iterations, converged: done })
}

/// Runs [`solve`] twice from the same start: once untraced to measure the
/// mean wall time per sweep, once traced. The returned trace carries
/// elapsed times reconstructed as iteration x mean sweep time.
pub fn timed_solve(x: &DataMatrix, f0: &Factorization, cfg: &SolverConfig) -> Result<(SolveOutcome, f64)> {
    let untraced = SolverConfig { trace_stride: 0, ..*cfg };
    let start = Instant::now();
    let timing_run = solve(x, f0, &untraced)?;
    let seconds_per_iteration = start.elapsed().as_secs_f64() / timing_run.iterations.max(1) as f64;

    let traced = SolverConfig { trace_stride: cfg.trace_stride.max(1), ..*cfg };
    let mut outcome = solve(x, f0, &traced)?;
    outcome.trace.reconstruct_time(seconds_per_iteration);
    Ok((outcome, seconds_per_iteration))
}
