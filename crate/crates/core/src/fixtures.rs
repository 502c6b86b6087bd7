//! Ground-truth problems constructed in code so that `X = W H` holds exactly.

use ndarray::{array, Array2};
use rand::Rng;

use crate::error::{NmfError, Result};
use crate::init::rng_for;
use crate::matrix::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedProblem {
    pub x: DataMatrix,
    pub w_true: Array2<f64>,
    pub h_true: Array2<f64>,
    pub description: String,
}

impl PlantedProblem {
    fn from_factors(w_true: Array2<f64>, h_true: Array2<f64>, description: String) -> Result<Self> {
        let x = DataMatrix::new(w_true.dot(&h_true))?;
        Ok(Self { x, w_true, h_true, description })
    }
}

/// The 8x8 rank-4 integer problem whose HALS trajectory shows two long
/// plateaus before full recovery.
pub fn appendix_a_fixture() -> PlantedProblem {
    let w = array![
        [6.0, 0.0, 4.0, 9.0],
        [0.0, 4.0, 8.0, 3.0],
        [4.0, 4.0, 0.0, 7.0],
        [9.0, 1.0, 1.0, 1.0],
        [0.0, 3.0, 0.0, 4.0],
        [8.0, 1.0, 4.0, 0.0],
        [0.0, 0.0, 4.0, 2.0],
        [0.0, 9.0, 5.0, 5.0],
    ];
    let h_t = array![
        [6.0, 0.0, 3.0, 4.0],
        [10.0, 10.0, 5.0, 9.0],
        [8.0, 2.0, 0.0, 10.0],
        [2.0, 9.0, 2.0, 7.0],
        [0.0, 10.0, 4.0, 7.0],
        [1.0, 6.0, 0.0, 0.0],
        [2.0, 0.0, 0.0, 0.0],
        [10.0, 0.0, 8.0, 0.0],
    ];
    PlantedProblem::from_factors(w, h_t.t().to_owned(), "8x8 rank-4 plateau fixture".into())
        .expect("fixture entries are nonnegative")
}

/// Uniform [0, 1) factors of rank `r`.
pub fn random_planted(m: usize, n: usize, r: usize, seed: u64) -> Result<PlantedProblem> {
    if m == 0 || n == 0 || r == 0 {
        return Err(NmfError::Dimension(format!("invalid planted shape {m}x{n}, rank {r}")));
    }
    let mut rng = rng_for(seed);
    let w = Array2::from_shape_simple_fn((m, r), || rng.random::<f64>());
    let h = Array2::from_shape_simple_fn((r, n), || rng.random::<f64>());
    PlantedProblem::from_factors(w, h, format!("random {m}x{n} rank {r}, seed {seed}"))
}

/// Random factors in which the last `dup_count` columns of `W` copy earlier
/// columns (column `r - dup_count + i` copies column `i mod (r - dup_count)`),
/// each with its own random `H` row.
pub fn planted_duplicates(m: usize, n: usize, r: usize, dup_count: usize, seed: u64) -> Result<PlantedProblem> {
    if dup_count >= r {
        return Err(NmfError::Rank(format!("dup_count {dup_count} must be below rank {r}")));
    }
    let base = random_planted(m, n, r, seed)?;
    let mut w = base.w_true;
    let originals = r - dup_count;
    for i in 0..dup_count {
        let src = w.column(i % originals).to_owned();
        w.column_mut(originals + i).assign(&src);
    }
    PlantedProblem::from_factors(
        w,
        base.h_true,
        format!("random {m}x{n} rank {r} with {dup_count} duplicated W columns, seed {seed}"),
    )
}
