//! Consistency diagnostics between factorizations and phase-plot helpers.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{NmfError, Result};
use crate::linalg::thin_svd;
use crate::matrix::{DataMatrix, Factorization};
use crate::merge::normalize_columns;
use crate::solvers::{fitting_error_percent, RunTrace};

/// Moore-Penrose pseudoinverse. Singular values at or below
/// `sigma_max * max(m, n) * f64::EPSILON` are treated as zero.
pub fn pseudo_inverse(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Array2::zeros((n, m));
    }
    let (u, s, v) = thin_svd(a);
    let cutoff = s.first().copied().unwrap_or(0.0) * m.max(n) as f64 * f64::EPSILON;
    let mut pinv = Array2::zeros((n, m));
    for (k, &sigma) in s.iter().enumerate() {
        if sigma > cutoff {
            let vk = v.column(k).insert_axis(Axis(1));
            let uk = u.column(k).insert_axis(Axis(0));
            pinv.scaled_add(1.0 / sigma, &vk.dot(&uk));
        }
    }
    pinv
}

fn squared_frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// `||W1 - W2 R2||^2 + ||W2 - W1 R1||^2` with `R2 = W2^+ W1`, `R1 = W1^+ W2`.
/// Zero exactly when the column spaces coincide.
pub fn subspace_consistency(w1: ArrayView2<'_, f64>, w2: ArrayView2<'_, f64>) -> Result<f64> {
    Ok(subspace_terms(w1, w2)?.0)
}

fn subspace_terms(w1: ArrayView2<'_, f64>, w2: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>, Array2<f64>)> {
    if w1.nrows() != w2.nrows() {
        return Err(NmfError::Dimension(format!("W1 has {} rows, W2 has {}", w1.nrows(), w2.nrows())));
    }
    let r1 = pseudo_inverse(w1).dot(&w2);
    let r2 = pseudo_inverse(w2).dot(&w1);
    let d = squared_frobenius(&(&w1 - &w2.dot(&r2))) + squared_frobenius(&(&w2 - &w1.dot(&r1)));
    Ok((d, r1, r2))
}

/// Deviation of a square mixing matrix from a permutation:
/// `sum r_ij^2 (r_ij - 1)^2 - (sum_i (sum_j r_ij - 1)^2 + sum_j (sum_i r_ij - 1)^2)`.
///
/// Evaluated exactly as written; far from a permutation it can be negative.
pub fn permutation_consistency(r: ArrayView2<'_, f64>) -> Result<f64> {
    let (rows, cols) = r.dim();
    if rows != cols {
        return Err(NmfError::Dimension(format!("permutation consistency needs a square matrix, got {rows}x{cols}")));
    }
    let entry_term: f64 = r.iter().map(|&v| v * v * (v - 1.0) * (v - 1.0)).sum();
    let row_term: f64 = r.sum_axis(Axis(1)).iter().map(|s| (s - 1.0) * (s - 1.0)).sum();
    let col_term: f64 = r.sum_axis(Axis(0)).iter().map(|s| (s - 1.0) * (s - 1.0)).sum();
    Ok(entry_term - (row_term + col_term))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub subspace_d: f64,
    /// Fitting error of the first run minus the second, in percent.
    pub fit_error_delta: f64,
    pub pc_r1: f64,
    pub pc_r2: f64,
}

/// Compares two factorizations of `x` after unit-normalizing their `W`
/// columns.
pub fn compare_runs(x: &DataMatrix, f1: &Factorization, f2: &Factorization) -> Result<ConsistencyReport> {
    if f1.rank() != f2.rank() {
        return Err(NmfError::Dimension(format!("ranks differ: {} vs {}", f1.rank(), f2.rank())));
    }
    let fit_error_delta = fitting_error_percent(x, f1)? - fitting_error_percent(x, f2)?;
    let n1 = normalize_columns(f1);
    let n2 = normalize_columns(f2);
    let (subspace_d, r1, r2) = subspace_terms(n1.w(), n2.w())?;
    Ok(ConsistencyReport {
        subspace_d,
        fit_error_delta,
        pc_r1: permutation_consistency(r1.view())?,
        pc_r2: permutation_consistency(r2.view())?,
    })
}

/// Paired objective values of two runs at a common time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub time: f64,
    pub first: f64,
    pub second: f64,
}

fn flatten(traces: &[RunTrace]) -> Vec<(f64, f64)> {
    traces.iter().flat_map(|t| t.samples.iter().map(|s| (s.elapsed_seconds, s.objective))).collect()
}

// Sample-and-hold value at `t`; before the first sample the first value holds.
fn held(series: &[(f64, f64)], t: f64) -> f64 {
    let idx = series.partition_point(|&(ts, _)| ts <= t);
    series[idx.saturating_sub(1)].1
}

/// Pairs two time-stamped objective series on the union of their sample
/// times, holding each value until its next sample. A run that has finished
/// keeps its final value.
pub fn phase_plot(first: &[RunTrace], second: &[RunTrace]) -> Vec<PhasePoint> {
    let a = flatten(first);
    let b = flatten(second);
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut times: Vec<f64> = a.iter().chain(b.iter()).map(|&(t, _)| t).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.into_iter().map(|time| PhasePoint { time, first: held(&a, time), second: held(&b, time) }).collect()
}

/// The part of a phase plot after either run has finished.
pub fn after_first_finish(points: &[PhasePoint], first: &[RunTrace], second: &[RunTrace]) -> Vec<PhasePoint> {
    let end = |ts: &[RunTrace]| {
        ts.iter().flat_map(|t| t.samples.last()).map(|s| s.elapsed_seconds).fold(f64::NEG_INFINITY, f64::max)
    };
    let cut = end(first).min(end(second));
    points.iter().copied().filter(|p| p.time >= cut).collect()
}
