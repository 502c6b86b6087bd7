//! Reference implementations used only as test oracles. Everything here is
//! written independently of the library's kernels: plain loops, dense
//! decompositions and exhaustive searches.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nmf_merge::merge::merge_pair;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((m, n), || rng.random::<f64>())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `0.5 * sum_ij (x_ij - sum_k w_ik h_kj)^2` by explicit loops.
pub fn brute_objective(x: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>, h: ArrayView2<'_, f64>) -> f64 {
    let (m, n) = x.dim();
    let r = w.ncols();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            let mut p = 0.0;
            for k in 0..r {
                p += w[[i, k]] * h[[k, j]];
            }
            let d = x[[i, j]] - p;
            total += d * d;
        }
    }
    0.5 * total
}

pub fn brute_fitting_error(x: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>, h: ArrayView2<'_, f64>) -> f64 {
    let energy: f64 = x.iter().map(|v| v * v).sum();
    100.0 * 2.0 * brute_objective(x, w, h) / energy
}

/// One HALS sweep written element by element: each W column is updated
/// from the current residual, then each H row.
pub fn straight_line_hals(x: ArrayView2<'_, f64>, w: &Array2<f64>, h: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (m, n) = x.dim();
    let r = w.ncols();
    let mut w = w.clone();
    let mut h = h.clone();
    let hh = |h: &Array2<f64>, a: usize, b: usize| (0..n).map(|j| h[[a, j]] * h[[b, j]]).sum::<f64>();
    let mut hht = vec![vec![0.0; r]; r];
    for a in 0..r {
        for b in 0..r {
            hht[a][b] = hh(&h, a, b);
        }
    }
    for k in 0..r {
        if hht[k][k] <= 0.0 {
            continue;
        }
        let mut col = vec![0.0; m];
        for (i, slot) in col.iter_mut().enumerate() {
            let mut xh = 0.0;
            for j in 0..n {
                xh += x[[i, j]] * h[[k, j]];
            }
            let mut whh = 0.0;
            for l in 0..r {
                whh += w[[i, l]] * hht[l][k];
            }
            *slot = (w[[i, k]] + (xh - whh) / hht[k][k]).max(0.0);
        }
        for (i, v) in col.into_iter().enumerate() {
            w[[i, k]] = v;
        }
    }
    let mut wtw = vec![vec![0.0; r]; r];
    for a in 0..r {
        for b in 0..r {
            wtw[a][b] = (0..m).map(|i| w[[i, a]] * w[[i, b]]).sum();
        }
    }
    for k in 0..r {
        if wtw[k][k] <= 0.0 {
            continue;
        }
        let mut row = vec![0.0; n];
        for (j, slot) in row.iter_mut().enumerate() {
            let mut wx = 0.0;
            for i in 0..m {
                wx += w[[i, k]] * x[[i, j]];
            }
            let mut wwh = 0.0;
            for l in 0..r {
                wwh += wtw[k][l] * h[[l, j]];
            }
            *slot = (h[[k, j]] + (wx - wwh) / wtw[k][k]).max(0.0);
        }
        for (j, v) in row.into_iter().enumerate() {
            h[[k, j]] = v;
        }
    }
    (w, h)
}

fn to_dmatrix(a: ArrayView2<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Leading two singular triplets of `w_p h_p^T + w_q h_q^T`.
#[derive(Debug, Clone)]
pub struct RankTwoSvd {
    pub sigma1: f64,
    pub sigma2: f64,
    pub u1: Array1<f64>,
    pub v1: Array1<f64>,
}

fn leading_pair(u: &DMatrix<f64>, s: &DVector<f64>, v_t: &DMatrix<f64>) -> (f64, f64, Array1<f64>, Array1<f64>) {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let top = idx[0];
    let second = idx.get(1).map_or(0.0, |&i| s[i]);
    let u1 = Array1::from_iter(u.column(top).iter().copied());
    let v1 = Array1::from_iter(v_t.row(top).iter().copied());
    (s[top], second, u1, v1)
}

/// Dense SVD of the full m x n rank-2 sum. Quadratic memory; small sizes
/// only. Singular values are accurate; singular vectors of such a
/// rank-deficient matrix can be off by ~1e-6, prefer [`rank_two_svd_qr`]
/// for them.
pub fn rank_two_svd_dense(
    w_p: ArrayView1<'_, f64>,
    h_p: ArrayView1<'_, f64>,
    w_q: ArrayView1<'_, f64>,
    h_q: ArrayView1<'_, f64>,
) -> RankTwoSvd {
    let (m, n) = (w_p.len(), h_p.len());
    let full = DMatrix::from_fn(m, n, |i, j| w_p[i] * h_p[j] + w_q[i] * h_q[j]);
    let svd = full.svd(true, true);
    let (sigma1, sigma2, u1, v1) = leading_pair(svd.u.as_ref().unwrap(), &svd.singular_values, svd.v_t.as_ref().unwrap());
    RankTwoSvd { sigma1, sigma2, u1, v1 }
}

/// Same triplets through thin QR of the two factors and a 2x2 SVD of the
/// core, for sizes where the dense matrix is too large.
pub fn rank_two_svd_qr(
    w_p: ArrayView1<'_, f64>,
    h_p: ArrayView1<'_, f64>,
    w_q: ArrayView1<'_, f64>,
    h_q: ArrayView1<'_, f64>,
) -> RankTwoSvd {
    let a = DMatrix::from_fn(w_p.len(), 2, |i, j| if j == 0 { w_p[i] } else { w_q[i] });
    let b = DMatrix::from_fn(h_p.len(), 2, |i, j| if j == 0 { h_p[i] } else { h_q[i] });
    let qa = a.qr();
    let qb = b.qr();
    let (q_a, r_a) = (qa.q(), qa.r());
    let (q_b, r_b) = (qb.q(), qb.r());
    let core: Matrix2<f64> = Matrix2::from_iterator((&r_a * r_b.transpose()).iter().copied());
    let svd = core.svd(true, true);
    let u_small = svd.u.unwrap();
    let v_t_small = svd.v_t.unwrap();
    let s = svd.singular_values;
    let top = if s[0] >= s[1] { 0 } else { 1 };
    let u1 = &q_a * u_small.column(top);
    let v1 = &q_b * v_t_small.row(top).transpose();
    RankTwoSvd {
        sigma1: s[top],
        sigma2: s[1 - top],
        u1: Array1::from_iter(u1.iter().copied()),
        v1: Array1::from_iter(v1.iter().copied()),
    }
}

/// Squared Frobenius norm of `w_p h_p^T + w_q h_q^T - w_m h_m^T`, expanded
/// entry by entry.
pub fn pair_residual(
    w_p: ArrayView1<'_, f64>,
    h_p: ArrayView1<'_, f64>,
    w_q: ArrayView1<'_, f64>,
    h_q: ArrayView1<'_, f64>,
    w_m: ArrayView1<'_, f64>,
    h_m: ArrayView1<'_, f64>,
) -> f64 {
    let mut total = 0.0;
    for i in 0..w_p.len() {
        for j in 0..h_p.len() {
            let d = w_p[i] * h_p[j] + w_q[i] * h_q[j] - w_m[i] * h_m[j];
            total += d * d;
        }
    }
    total
}

/// A random nonnegative unit vector supported on `support`.
fn unit_on(rng: &mut ChaCha8Rng, len: usize, support: std::ops::Range<usize>) -> Array1<f64> {
    loop {
        let mut v = Array1::zeros(len);
        for i in support.clone() {
            v[i] = rng.random::<f64>();
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

/// Two nonnegative unit vectors of length `len >= 2` with cosine exactly
/// `cos` up to rounding: `a` and `b` have disjoint supports, the second
/// vector is `cos a + sqrt(1 - cos^2) b`.
pub fn unit_pair_with_cosine(rng: &mut ChaCha8Rng, len: usize, cos: f64) -> (Array1<f64>, Array1<f64>) {
    assert!(len >= 2);
    let half = len / 2;
    let a = unit_on(rng, len, 0..half);
    let b = unit_on(rng, len, half..len);
    let s = ((1.0 - cos) * (1.0 + cos)).sqrt();
    let second = cos * &a + s * &b;
    (a, second)
}

/// A merge test pair: unit `w` vectors with cosine `c`, `h` vectors with
/// cosine `g` and norms `h_p`, `h_q`.
pub fn planted_pair(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    c: f64,
    g: f64,
    h_p: f64,
    h_q: f64,
) -> (Array1<f64>, Array1<f64>, Array1<f64>, Array1<f64>) {
    let (w_p, w_q) = unit_pair_with_cosine(rng, m, c);
    let (hp_dir, hq_dir) = unit_pair_with_cosine(rng, n, g);
    (w_p, h_p * hp_dir, w_q, h_q * hq_dir)
}

/// Random nonnegative pair with unit `w` vectors and uniform `h` entries.
pub fn random_pair(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (Array1<f64>, Array1<f64>, Array1<f64>, Array1<f64>) {
    let w_p = unit_on(rng, m, 0..m);
    let w_q = unit_on(rng, m, 0..m);
    let scale_p = 10.0 * rng.random::<f64>() + 0.1;
    let scale_q = 10.0 * rng.random::<f64>() + 0.1;
    let h_p = Array1::from_shape_simple_fn(n, || scale_p * rng.random::<f64>());
    let h_q = Array1::from_shape_simple_fn(n, || scale_q * rng.random::<f64>());
    (w_p, h_p, w_q, h_q)
}

/// Greedy merge by rescanning every live pair at every step. Ties go to the
/// first pair in `(a, b)` order; the merged component takes slot `a`.
pub fn naive_greedy_merge(
    w: ArrayView2<'_, f64>,
    h: ArrayView2<'_, f64>,
    target: usize,
) -> (Vec<(usize, usize, f64)>, Array2<f64>, Array2<f64>) {
    let r = w.ncols();
    let mut comps: Vec<Option<(Array1<f64>, Array1<f64>)>> =
        (0..r).map(|j| Some((w.column(j).to_owned(), h.row(j).to_owned()))).collect();
    let mut seq = Vec::new();
    let mut live = r;
    while live > target {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..r {
            for b in a + 1..r {
                if let (Some(p), Some(q)) = (&comps[a], &comps[b]) {
                    let pen = merge_pair(p.0.view(), p.1.view(), q.0.view(), q.1.view()).lambda_min;
                    if best.is_none_or(|(bp, _, _)| pen < bp) {
                        best = Some((pen, a, b));
                    }
                }
            }
        }
        let (pen, a, b) = best.expect("at least two live components");
        let q = comps[b].take().unwrap();
        let p = comps[a].take().unwrap();
        let merged = merge_pair(p.0.view(), p.1.view(), q.0.view(), q.1.view());
        comps[a] = Some((merged.w_merged, merged.h_merged));
        seq.push((a, b, pen));
        live -= 1;
    }
    let alive: Vec<_> = comps.into_iter().flatten().collect();
    let mut w_out = Array2::zeros((w.nrows(), alive.len()));
    let mut h_out = Array2::zeros((alive.len(), h.ncols()));
    for (j, (wc, hr)) in alive.iter().enumerate() {
        w_out.column_mut(j).assign(wc);
        h_out.row_mut(j).assign(hr);
    }
    (seq, w_out, h_out)
}

/// Explores every merge order down to `target` and returns the product of
/// the order whose penalty sequence is lexicographically smallest, together
/// with that sequence. Exponential; intended for r <= 5.
pub fn exhaustive_greedy_product(w: ArrayView2<'_, f64>, h: ArrayView2<'_, f64>, target: usize) -> (Vec<f64>, Array2<f64>) {
    type Comp = (Array1<f64>, Array1<f64>);
    fn product(comps: &[Comp], m: usize, n: usize) -> Array2<f64> {
        let mut out = Array2::zeros((m, n));
        for (wc, hr) in comps {
            for i in 0..m {
                for j in 0..n {
                    out[[i, j]] += wc[i] * hr[j];
                }
            }
        }
        out
    }
    fn better(a: &[f64], b: &[f64]) -> bool {
        for (x, y) in a.iter().zip(b) {
            if x != y {
                return x < y;
            }
        }
        false
    }
    fn walk(comps: Vec<Comp>, target: usize, seq: Vec<f64>, m: usize, n: usize, best: &mut Option<(Vec<f64>, Array2<f64>)>) {
        if comps.len() == target {
            if best.as_ref().is_none_or(|(b, _)| better(&seq, b)) {
                *best = Some((seq, product(&comps, m, n)));
            }
            return;
        }
        for a in 0..comps.len() {
            for b in a + 1..comps.len() {
                let (p, q) = (&comps[a], &comps[b]);
                let merged = merge_pair(p.0.view(), p.1.view(), q.0.view(), q.1.view());
                let mut next: Vec<Comp> = Vec::with_capacity(comps.len() - 1);
                for (k, comp) in comps.iter().enumerate() {
                    if k == a {
                        next.push((merged.w_merged.clone(), merged.h_merged.clone()));
                    } else if k != b {
                        next.push(comp.clone());
                    }
                }
                let mut s = seq.clone();
                s.push(merged.lambda_min);
                walk(next, target, s, m, n, best);
            }
        }
    }
    let comps: Vec<Comp> = (0..w.ncols()).map(|j| (w.column(j).to_owned(), h.row(j).to_owned())).collect();
    let mut best = None;
    walk(comps, target, Vec::new(), w.nrows(), h.ncols(), &mut best);
    let (seq, prod) = best.expect("at least one order");
    (seq, prod)
}

/// Expected exact-zero pattern of NNDSVD for components 1.. (the leading
/// component is dense). Singular pairs come from the eigendecomposition of
/// `X^T X`; `u = X v / sigma`. Returns `(w_zero, h_zero, decided)`, where
/// entries whose oracle value lies within `margin` of zero are marked
/// undecided.
pub fn nndsvd_zero_pattern(
    x: ArrayView2<'_, f64>,
    r: usize,
    margin: f64,
) -> (Array2<bool>, Array2<bool>, Array2<bool>, Array2<bool>) {
    let (m, n) = x.dim();
    let xm = to_dmatrix(x);
    let eig = SymmetricEigen::new(xm.transpose() * &xm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut w_zero = Array2::from_elem((m, r), false);
    let mut h_zero = Array2::from_elem((r, n), false);
    let mut w_decided = Array2::from_elem((m, r), true);
    let mut h_decided = Array2::from_elem((r, n), true);
    for j in 1..r {
        let idx = order[j];
        let sigma = eig.eigenvalues[idx].max(0.0).sqrt();
        let v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let u: Vec<f64> = (0..m).map(|i| (0..n).map(|k| x[[i, k]] * v[k]).sum::<f64>() / sigma).collect();
        let pos_norm = |s: &[f64]| s.iter().map(|t| t.max(0.0).powi(2)).sum::<f64>().sqrt();
        let neg_norm = |s: &[f64]| s.iter().map(|t| (-t).max(0.0).powi(2)).sum::<f64>().sqrt();
        let positive = pos_norm(&u) * pos_norm(&v) >= neg_norm(&u) * neg_norm(&v);
        for i in 0..m {
            let kept = if positive { u[i] } else { -u[i] };
            w_zero[[i, j]] = kept <= 0.0;
            w_decided[[i, j]] = u[i].abs() > margin;
        }
        for k in 0..n {
            let kept = if positive { v[k] } else { -v[k] };
            h_zero[[j, k]] = kept <= 0.0;
            h_decided[[j, k]] = v[k].abs() > margin;
        }
    }
    (w_zero, h_zero, w_decided, h_decided)
}

/// Squared Frobenius norm of the difference of two matrices.
pub fn sq_dist(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Orthonormal columns spanning a random `dim`-dimensional subspace of R^m.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, m: usize, dim: usize) -> Array2<f64> {
    let a = DMatrix::from_fn(m, dim, |_, _| rng.random::<f64>() - 0.5);
    let q = a.qr().q();
    Array2::from_shape_fn((m, dim), |(i, j)| q[(i, j)])
}

/// Random permutation matrix of size `r`.
pub fn random_permutation(rng: &mut ChaCha8Rng, r: usize) -> Array2<f64> {
    let mut perm: Vec<usize> = (0..r).collect();
    for i in (1..r).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut p = Array2::zeros((r, r));
    for (i, &j) in perm.iter().enumerate() {
        p[[i, j]] = 1.0;
    }
    p
}

/// Random invertible matrix `Q1 diag(s) Q2^T` with singular values in
/// `[1, cond]`.
pub fn random_conditioned(rng: &mut ChaCha8Rng, r: usize, cond: f64) -> Array2<f64> {
    let q1 = random_orthonormal(rng, r, r);
    let q2 = random_orthonormal(rng, r, r);
    let s: Vec<f64> = (0..r).map(|_| 1.0 + (cond - 1.0) * rng.random::<f64>()).collect();
    Array2::from_shape_fn((r, r), |(i, j)| (0..r).map(|k| q1[[i, k]] * s[k] * q2[[j, k]]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_and_dense_agree() {
        let mut g = rng(3);
        for _ in 0..20 {
            let (wp, hp, wq, hq) = random_pair(&mut g, 7, 9);
            let a = rank_two_svd_dense(wp.view(), hp.view(), wq.view(), hq.view());
            let b = rank_two_svd_qr(wp.view(), hp.view(), wq.view(), hq.view());
            assert!(rel_close(a.sigma1, b.sigma1, 1e-12));
            assert!((a.sigma2 - b.sigma2).abs() <= 1e-10 * a.sigma1);
        }
    }

    #[test]
    fn planted_cosines_are_exact() {
        let mut g = rng(5);
        let (a, b) = unit_pair_with_cosine(&mut g, 6, 0.3);
        assert!((a.dot(&b) - 0.3).abs() < 1e-15);
        assert!((b.dot(&b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn permutation_is_orthogonal() {
        let mut g = rng(1);
        let p = random_permutation(&mut g, 6);
        let eye = p.t().dot(&p);
        assert_eq!(eye, Array2::eye(6));
    }
}
