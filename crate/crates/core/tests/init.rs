use ndarray::Array2;
use nmf_merge::init::{initialize, nndsvd_init, random_init};
use nmf_merge::{DataMatrix, InitKind, InitSpec, NmfError};
use nmf_merge_testkit as tk;
use proptest::prelude::*;

fn random_data(seed: u64, m: usize, n: usize) -> DataMatrix {
    let mut g = tk::rng(seed);
    DataMatrix::new(tk::uniform_matrix(&mut g, m, n)).unwrap()
}

#[test]
fn random_init_is_seeded() {
    assert_eq!(random_init(4, 5, 2, 7), random_init(4, 5, 2, 7));
    assert_ne!(random_init(4, 5, 2, 0), random_init(4, 5, 2, 1));
    let one = random_init(1, 1, 1, 0);
    assert!((0.0..1.0).contains(&one.w()[[0, 0]]));
    assert!((0.0..1.0).contains(&one.h()[[0, 0]]));
}

#[test]
fn perron_pair_reconstructs_rank_one() {
    let u = [0.5, 2.0, 1.0, 3.0];
    let v = [1.0, 0.2, 0.7, 1.1, 2.4];
    let x = DataMatrix::new(Array2::from_shape_fn((4, 5), |(i, j)| u[i] * v[j])).unwrap();
    for kind in [InitKind::Nndsvd, InitKind::Nndsvda, InitKind::Nndsvdar] {
        let f = nndsvd_init(&x, 1, kind, 0).unwrap();
        let prod = f.product();
        assert!(tk::sq_dist(prod.view(), x.values()) < 1e-20 * x.squared_norm());
        for i in 0..4 {
            assert!((f.w()[[i, 0]] / f.w()[[0, 0]] - u[i] / u[0]).abs() < 1e-10);
        }
        for j in 0..5 {
            assert!((f.h()[[0, j]] / f.h()[[0, 0]] - v[j] / v[0]).abs() < 1e-10);
        }
    }
}

#[test]
fn leading_component_carries_sigma_one() {
    let x = random_data(4, 9, 7);
    let f = nndsvd_init(&x, 3, InitKind::Nndsvd, 0).unwrap();
    let xm = x.values().to_owned();
    let gram = xm.t().dot(&xm);
    // Power iteration for the top eigenvalue of X^T X.
    let mut v = ndarray::Array1::from_elem(7, 1.0);
    for _ in 0..500 {
        let next = gram.dot(&v);
        v = &next / next.dot(&next).sqrt();
    }
    let sigma1 = v.dot(&gram.dot(&v)).sqrt();
    let w0 = f.w().column(0).to_owned();
    let h0 = f.h().row(0).to_owned();
    assert!(tk::rel_close(w0.dot(&w0).sqrt() * h0.dot(&h0).sqrt(), sigma1, 1e-10));
}

#[test]
fn nndsvd_zero_pattern_matches_oracle() {
    for seed in 0..20 {
        let x = random_data(100 + seed, 10, 8);
        let r = 4;
        let f = nndsvd_init(&x, r, InitKind::Nndsvd, 0).unwrap();
        let (w_zero, h_zero, w_ok, h_ok) = tk::nndsvd_zero_pattern(x.values(), r, 1e-8);
        for ((i, j), &z) in w_zero.indexed_iter() {
            if j > 0 && w_ok[[i, j]] {
                assert_eq!(f.w()[[i, j]] == 0.0, z, "seed {seed} W[{i},{j}]");
            }
        }
        for ((i, j), &z) in h_zero.indexed_iter() {
            if i > 0 && h_ok[[i, j]] {
                assert_eq!(f.h()[[i, j]] == 0.0, z, "seed {seed} H[{i},{j}]");
            }
        }
        assert!(f.w().column(0).iter().all(|&v| v > 0.0));
    }
}

#[test]
fn fill_rules() {
    let x = random_data(9, 8, 6);
    let plain = nndsvd_init(&x, 3, InitKind::Nndsvd, 0).unwrap();
    assert!(plain.w().iter().any(|&v| v == 0.0));
    let a = nndsvd_init(&x, 3, InitKind::Nndsvda, 0).unwrap();
    assert!(a.w().iter().chain(a.h().iter()).all(|&v| v > 0.0));
    let ar = nndsvd_init(&x, 3, InitKind::Nndsvdar, 5).unwrap();
    assert_eq!(ar, nndsvd_init(&x, 3, InitKind::Nndsvdar, 5).unwrap());
    let cap = x.mean() / 100.0;
    for (p, q) in plain.w().iter().zip(ar.w().iter()) {
        if *p == 0.0 {
            assert!((0.0..=cap).contains(q));
        } else {
            assert_eq!(p, q);
        }
    }
}

#[test]
fn deterministic_kinds_ignore_the_seed() {
    let x = random_data(2, 7, 7);
    for kind in [InitKind::Nndsvd, InitKind::Nndsvda] {
        let a = initialize(&x, 3, &InitSpec { kind, seed: 1 }).unwrap();
        let b = initialize(&x, 3, &InitSpec { kind, seed: 2 }).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn rank_above_min_dimension_is_rejected() {
    let x = random_data(3, 4, 6);
    assert!(matches!(nndsvd_init(&x, 5, InitKind::Nndsvd, 0), Err(NmfError::Rank(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_kind_gives_nonnegative_factors_of_requested_shape(
        seed in any::<u64>(), m in 1usize..15, n in 1usize..15, kind_idx in 0usize..4
    ) {
        let kind = [InitKind::Random, InitKind::Nndsvd, InitKind::Nndsvda, InitKind::Nndsvdar][kind_idx];
        let x = DataMatrix::new(random_data(seed, m, n).into_inner() + 1e-6).unwrap();
        let r = 1 + (seed as usize) % m.min(n);
        let f = initialize(&x, r, &InitSpec { kind, seed }).unwrap();
        prop_assert_eq!(f.w().dim(), (m, r));
        prop_assert_eq!(f.h().dim(), (r, n));
        prop_assert!(f.w().iter().chain(f.h().iter()).all(|&v| v >= 0.0 && v.is_finite()));
        prop_assert_eq!(&f, &initialize(&x, r, &InitSpec { kind, seed }).unwrap());
    }
}
