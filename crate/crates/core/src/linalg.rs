//! Dense SVD helpers bridging ndarray storage and nalgebra's decomposition.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2};

/// One singular triplet `(sigma, u, v)` with unit `u` and `v`.
#[derive(Debug, Clone)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Array1<f64>,
    pub v: Array1<f64>,
}

pub(crate) fn to_nalgebra(a: ArrayView2<'_, f64>) -> DMatrix<f64> {
    let (m, n) = a.dim();
    DMatrix::from_fn(m, n, |i, j| a[[i, j]])
}

/// Thin SVD with singular values in non-increasing order.
///
/// Returns `(U, sigma, V)` where `U` is m x p, `V` is n x p and p = min(m, n).
pub fn thin_svd(a: ArrayView2<'_, f64>) -> (Array2<f64>, Array1<f64>, Array2<f64>) {
    let svd = to_nalgebra(a).svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));

    let (m, n) = a.dim();
    let p = order.len();
    let mut u_out = Array2::zeros((m, p));
    let mut v_out = Array2::zeros((n, p));
    let mut s_out = Array1::zeros(p);
    for (k, &idx) in order.iter().enumerate() {
        s_out[k] = s[idx];
        for i in 0..m {
            u_out[[i, k]] = u[(i, idx)];
        }
        for j in 0..n {
            v_out[[j, k]] = v_t[(idx, j)];
        }
    }
    (u_out, s_out, v_out)
}

/// Leading `k` singular triplets of `a` (fewer if `k` exceeds min(m, n)).
pub fn truncated_svd(a: ArrayView2<'_, f64>, k: usize) -> Vec<SingularTriplet> {
    let (u, s, v) = thin_svd(a);
    (0..k.min(s.len()))
        .map(|i| SingularTriplet {
            sigma: s[i],
            u: u.column(i).to_owned(),
            v: v.column(i).to_owned(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn thin_svd_reconstructs() {
        let a = array![[3.0, 1.0, 0.5], [1.0, 2.0, 0.0], [0.0, 4.0, 1.0], [2.0, 2.0, 2.0]];
        let (u, s, v) = thin_svd(a.view());
        assert!(s.windows(2).into_iter().all(|w| w[0] >= w[1]));
        let rebuilt = u.dot(&Array2::from_diag(&s)).dot(&v.t());
        for (x, y) in a.iter().zip(rebuilt.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_caps_at_min_dim() {
        let a = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        assert_eq!(truncated_svd(a.view(), 5).len(), 2);
    }
}
