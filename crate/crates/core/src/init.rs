//! Starting points for the solvers: seeded uniform random factors and the
//! SVD-based NNDSVD family.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NmfError, Result};
use crate::linalg::truncated_svd;
use crate::matrix::{DataMatrix, Factorization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    #[default]
    Random,
    Nndsvd,
    Nndsvda,
    Nndsvdar,
}

impl InitKind {
    pub fn uses_seed(self) -> bool {
        matches!(self, InitKind::Random | InitKind::Nndsvdar)
    }
}

impl std::fmt::Display for InitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InitKind::Random => "random",
            InitKind::Nndsvd => "nndsvd",
            InitKind::Nndsvda => "nndsvda",
            InitKind::Nndsvdar => "nndsvdar",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct InitSpec {
    pub kind: InitKind,
    /// Only read by `Random` and `Nndsvdar`.
    pub seed: u64,
}

impl InitSpec {
    pub fn random(seed: u64) -> Self {
        Self { kind: InitKind::Random, seed }
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries drawn i.i.d. uniform on [0, 1): W row-major, then H row-major.
pub fn random_init(m: usize, n: usize, r: usize, seed: u64) -> Factorization {
    let mut rng = rng_for(seed);
    let w = Array2::from_shape_simple_fn((m, r), || rng.random::<f64>());
    let h = Array2::from_shape_simple_fn((r, n), || rng.random::<f64>());
    Factorization::from_parts(w, h)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// NNDSVD-family initialization of rank `r`.
///
/// `kind` must be one of the NNDSVD variants; `seed` only matters for
/// `Nndsvdar`.
pub fn nndsvd_init(x: &DataMatrix, r: usize, kind: InitKind, seed: u64) -> Result<Factorization> {
    let (m, n) = x.dim();
    if r == 0 || r > m.min(n) {
        return Err(NmfError::Rank(format!("NNDSVD rank {r} must lie in 1..={}", m.min(n))));
    }
    if kind == InitKind::Random {
        return Err(NmfError::Config("nndsvd_init called with the random kind".into()));
    }

    let triplets = truncated_svd(x.values(), r);
    let mut w = Array2::zeros((m, r));
    let mut h = Array2::zeros((r, n));

    for (j, t) in triplets.iter().enumerate() {
        if j == 0 {
            // Perron pair: a nonnegative matrix has a nonnegative leading pair.
            let s = t.sigma.sqrt();
            for i in 0..m {
                w[[i, 0]] = s * t.u[i].abs();
            }
            for k in 0..n {
                h[[0, k]] = s * t.v[k].abs();
            }
            continue;
        }
        let up: Vec<f64> = t.u.iter().map(|v| v.max(0.0)).collect();
        let un: Vec<f64> = t.u.iter().map(|v| (-v).max(0.0)).collect();
        let vp: Vec<f64> = t.v.iter().map(|v| v.max(0.0)).collect();
        let vn: Vec<f64> = t.v.iter().map(|v| (-v).max(0.0)).collect();
        let (nup, nvp, nun, nvn) = (norm(&up), norm(&vp), norm(&un), norm(&vn));
        let (uu, vv, nu, nv) = if nup * nvp >= nun * nvn { (up, vp, nup, nvp) } else { (un, vn, nun, nvn) };
        let mass = nu * nv;
        if mass <= 0.0 {
            continue;
        }
        let s = (t.sigma * mass).sqrt();
        for i in 0..m {
            w[[i, j]] = s * uu[i] / nu;
        }
        for k in 0..n {
            h[[j, k]] = s * vv[k] / nv;
        }
    }

    let mean = x.mean();
    match kind {
        InitKind::Nndsvda => {
            w.mapv_inplace(|v| if v == 0.0 { mean } else { v });
            h.mapv_inplace(|v| if v == 0.0 { mean } else { v });
        }
        InitKind::Nndsvdar => {
            let mut rng = rng_for(seed);
            let scale = mean / 100.0;
            for v in w.iter_mut().chain(h.iter_mut()) {
                if *v == 0.0 {
                    *v = scale * rng.random::<f64>();
                }
            }
        }
        _ => {}
    }
    Ok(Factorization::from_parts(w, h))
}

/// Dispatches on `spec.kind`.
pub fn initialize(x: &DataMatrix, r: usize, spec: &InitSpec) -> Result<Factorization> {
    match spec.kind {
        InitKind::Random => {
            if r == 0 {
                return Err(NmfError::Rank("rank must be positive".into()));
            }
            Ok(random_init(x.rows(), x.cols(), r, spec.seed))
        }
        kind => nndsvd_init(x, r, kind, spec.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn random_is_reproducible() {
        assert_eq!(random_init(4, 5, 2, 7), random_init(4, 5, 2, 7));
    }

    #[test]
    fn random_seeds_differ() {
        assert_ne!(random_init(4, 5, 2, 0), random_init(4, 5, 2, 1));
    }

    #[test]
    fn random_single_entry_in_unit_interval() {
        let f = random_init(1, 1, 1, 0);
        let v = f.w()[[0, 0]];
        assert!((0.0..1.0).contains(&v));
    }

    #[test]
    fn nndsvd_rank_one_perron_pair() {
        let u = array![1.0, 2.0, 0.5];
        let v = array![0.2, 3.0, 1.0, 4.0];
        let x = DataMatrix::new(Array2::from_shape_fn((3, 4), |(i, j)| u[i] * v[j])).unwrap();
        let f = nndsvd_init(&x, 1, InitKind::Nndsvd, 0).unwrap();
        let rebuilt = f.product();
        for (a, b) in rebuilt.iter().zip(x.values().iter()) {
            assert!((a - b).abs() < 1e-10);
        }
        let ratio = f.w()[[0, 0]] / u[0];
        for i in 0..3 {
            assert!((f.w()[[i, 0]] / u[i] - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn nndsvd_rank_too_large() {
        let x = DataMatrix::new(array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert!(matches!(nndsvd_init(&x, 3, InitKind::Nndsvd, 0), Err(NmfError::Rank(_))));
    }

    #[test]
    fn nndsvda_has_no_zeros() {
        let x = DataMatrix::new(array![[1.0, 0.0, 2.0, 0.5], [0.0, 3.0, 1.0, 0.0], [2.0, 1.0, 0.0, 4.0]]).unwrap();
        let f = nndsvd_init(&x, 3, InitKind::Nndsvda, 0).unwrap();
        assert!(f.w().iter().chain(f.h().iter()).all(|&v| v > 0.0));
        let plain = nndsvd_init(&x, 3, InitKind::Nndsvd, 0).unwrap();
        assert!(plain.w().iter().chain(plain.h().iter()).any(|&v| v == 0.0));
    }

    #[test]
    fn nndsvdar_fill_is_small_and_seeded() {
        let x = DataMatrix::new(array![[1.0, 0.0, 2.0, 0.5], [0.0, 3.0, 1.0, 0.0], [2.0, 1.0, 0.0, 4.0]]).unwrap();
        let a = nndsvd_init(&x, 3, InitKind::Nndsvdar, 5).unwrap();
        let b = nndsvd_init(&x, 3, InitKind::Nndsvdar, 5).unwrap();
        assert_eq!(a, b);
        let plain = nndsvd_init(&x, 3, InitKind::Nndsvd, 0).unwrap();
        let cap = x.mean() / 100.0;
        for (p, q) in plain.w().iter().chain(plain.h().iter()).zip(a.w().iter().chain(a.h().iter())) {
            if *p == 0.0 {
                assert!((0.0..cap).contains(q));
            } else {
                assert_eq!(p, q);
            }
        }
    }
}
