//! Feature recovery: append `k` nonnegative components that capture
//! structure of `X` missing from the current `W H`.
//!
//! `ResidualSvd` takes the leading singular triplets of `R = X - W H`,
//! keeps the sign half (`u+ v+` or `u- v-`) with the larger norm product,
//! and uses its normalized `u` part as the new `w`. The new `h` is the
//! best nonnegative row for that `w` against the residual left by the
//! components appended before it, `h = max(0, R^T w)`, so each appended
//! component can only lower the objective.

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NmfError, Result};
use crate::init::rng_for;
use crate::linalg::truncated_svd;
use crate::matrix::{DataMatrix, Factorization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStrategy {
    #[default]
    ResidualSvd,
    /// Uniform random directions, seeded.
    RandomNonnegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoverySpec {
    pub k: usize,
    pub strategy: RecoveryStrategy,
    pub seed: u64,
    /// Permit `r + k > min(m, n)`.
    pub allow_overcomplete: bool,
}

impl RecoverySpec {
    pub fn residual_svd(k: usize) -> Self {
        Self { k, strategy: RecoveryStrategy::ResidualSvd, seed: 0, allow_overcomplete: false }
    }
}

/// Default number of extra components: 20% of the target rank, rounded up.
pub fn default_extra_components(target_rank: usize) -> usize {
    (target_rank * 2).div_ceil(10).max(1)
}

fn sign_split_direction(u: &Array1<f64>, v: &Array1<f64>) -> Option<Array1<f64>> {
    let up = u.mapv(|x| x.max(0.0));
    let un = u.mapv(|x| (-x).max(0.0));
    let norm = |a: &Array1<f64>| a.dot(a).sqrt();
    let pos = norm(&up) * norm(&v.mapv(|x| x.max(0.0)));
    let neg = norm(&un) * norm(&v.mapv(|x| (-x).max(0.0)));
    let dir = if pos >= neg { up } else { un };
    let n = norm(&dir);
    (pos.max(neg) > 0.0 && n > 0.0).then(|| dir / n)
}

/// Returns `F` with `spec.k` components appended; the first `r` components
/// are copied unchanged.
pub fn recover_components(x: &DataMatrix, f: &Factorization, spec: &RecoverySpec) -> Result<Factorization> {
    f.check_compatible(x)?;
    let (m, n) = x.dim();
    let r = f.rank();
    if spec.k == 0 {
        return Err(NmfError::Config("number of recovered components must be at least 1".into()));
    }
    if !spec.allow_overcomplete && r + spec.k > m.min(n) {
        return Err(NmfError::Rank(format!(
            "rank {} + {} recovered components exceeds min(m, n) = {}",
            r,
            spec.k,
            m.min(n)
        )));
    }

    let mut residual = &x.values() - &f.product();
    let directions: Vec<Option<Array1<f64>>> = match spec.strategy {
        RecoveryStrategy::ResidualSvd => {
            let mut dirs: Vec<_> = truncated_svd(residual.view(), spec.k)
                .iter()
                .map(|t| sign_split_direction(&t.u, &t.v))
                .collect();
            dirs.resize(spec.k, None);
            dirs
        }
        RecoveryStrategy::RandomNonnegative => {
            let mut rng = rng_for(spec.seed);
            (0..spec.k)
                .map(|_| {
                    let d = Array1::from_shape_simple_fn(m, || rng.random::<f64>());
                    let n = d.dot(&d).sqrt();
                    (n > 0.0).then(|| d / n)
                })
                .collect()
        }
    };

    let mut w_extra = Array2::zeros((m, spec.k));
    let mut h_extra = Array2::zeros((spec.k, n));
    for (j, dir) in directions.into_iter().enumerate() {
        let Some(w) = dir else { continue };
        let h = residual.t().dot(&w).mapv(|v| v.max(0.0));
        for i in 0..m {
            if w[i] != 0.0 {
                let wi = w[i];
                residual.row_mut(i).scaled_add(-wi, &h);
            }
        }
        w_extra.column_mut(j).assign(&w);
        h_extra.row_mut(j).assign(&h);
    }
    f.append(w_extra.view(), h_extra.view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::objective;
    use ndarray::array;

    #[test]
    fn default_k_is_twenty_percent_rounded_up() {
        assert_eq!(default_extra_components(1), 1);
        assert_eq!(default_extra_components(4), 1);
        assert_eq!(default_extra_components(5), 1);
        assert_eq!(default_extra_components(6), 2);
        assert_eq!(default_extra_components(17), 4);
        assert_eq!(default_extra_components(23), 5);
    }

    #[test]
    fn exact_factorization_appends_negligible_component() {
        let w = array![[1.0, 0.2], [0.5, 1.0], [0.3, 0.3], [2.0, 0.1]];
        let h = array![[1.0, 0.0, 2.0, 1.0], [0.5, 1.0, 0.1, 3.0]];
        let x = DataMatrix::new(w.dot(&h)).unwrap();
        let f = Factorization::new(w, h).unwrap();
        let g = recover_components(&x, &f, &RecoverySpec::residual_svd(1)).unwrap();
        let wn = g.w_column(2).dot(&g.w_column(2)).sqrt();
        let hn = g.h_row(2).dot(&g.h_row(2)).sqrt();
        assert!(wn * hn <= 1e-8 * x.squared_norm().sqrt());
    }

    #[test]
    fn rank_limit_enforced() {
        let x = DataMatrix::new(array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let f = Factorization::new(array![[1.0, 0.0], [0.0, 1.0]], array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!(matches!(recover_components(&x, &f, &RecoverySpec::residual_svd(1)), Err(NmfError::Rank(_))));
        let spec = RecoverySpec { allow_overcomplete: true, ..RecoverySpec::residual_svd(1) };
        assert_eq!(recover_components(&x, &f, &spec).unwrap().rank(), 3);
    }

    #[test]
    fn random_strategy_is_seeded_and_never_hurts() {
        let x = DataMatrix::new(array![[1.0, 2.0, 0.5], [3.0, 1.0, 2.0], [0.2, 4.0, 1.0], [1.0, 1.0, 1.0]]).unwrap();
        let f = Factorization::new(array![[0.5], [0.5], [0.5], [0.5]], array![[1.0, 1.0, 1.0]]).unwrap();
        let spec = RecoverySpec { k: 2, strategy: RecoveryStrategy::RandomNonnegative, seed: 3, allow_overcomplete: false };
        let a = recover_components(&x, &f, &spec).unwrap();
        assert_eq!(a, recover_components(&x, &f, &spec).unwrap());
        assert!(objective(&x, &a).unwrap() <= objective(&x, &f).unwrap());
    }
}
