//! Property suite for the dense kernels: factorization invariants,
//! oracle comparisons and file-format round trips.

mod common;

use common::*;
use proptest::prelude::*;
use stabgrad_core::dense::{
    market, spectral_norm, spectral_radius_estimate, svd, CholeskyFactor, DenseMatrix, PowerConfig,
    Vector,
};

#[test]
fn cholesky_solve_recovers_solution_on_random_spd() {
    let mut rng = rng(0xC0FFEE);
    for case in 0..60 {
        let n = 1 + (case % 64);
        let m = random_spd(&mut rng, n);
        let x = random_vector(&mut rng, n);
        let rhs = m.matvec(&x).unwrap();
        let f = CholeskyFactor::new(&m).unwrap();
        let back = f.solve(&rhs).unwrap();
        let rel = back.sub(&x).norm() / x.norm().max(1e-300);
        assert!(rel <= 1e-8, "n = {n}: relative error {rel}");
    }
}

#[test]
fn cholesky_solve_matches_gaussian_elimination() {
    let m = DenseMatrix::<f64>::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
    let rhs = Vector::new(vec![6.0, 5.0]).unwrap();
    let via_chol = CholeskyFactor::new(&m).unwrap().solve(&rhs).unwrap();
    let via_ge = gaussian_elimination_solve(&m, &rhs).unwrap();
    assert!(via_chol.sub(&via_ge).norm() <= 1e-12);
}

#[test]
fn svd_invariants_on_random_matrices() {
    // 100 random instances sized 2..=32: reconstruction, orthogonality,
    // descending order.
    let mut rng = rng(0x5EED);
    for case in 0..100 {
        let n = 2 + (case % 31);
        let a = random_matrix(&mut rng, n, n);
        let f = svd(&a).unwrap();
        let sig = f.sigma();
        for k in 1..n {
            assert!(sig[k - 1] >= sig[k], "sigma must be nonincreasing");
        }
        let i_n = DenseMatrix::identity(n);
        let utu = f.u().transpose().matmul(f.u()).unwrap();
        let vtv = f.v().transpose().matmul(f.v()).unwrap();
        assert!(utu.sub(&i_n).unwrap().max_abs() <= 1e-10, "UᵀU deviates");
        assert!(vtv.sub(&i_n).unwrap().max_abs() <= 1e-10, "VᵀV deviates");
        let rec = DenseMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| f.u().get(i, k) * sig[k] * f.v().get(j, k))
                .sum()
        });
        let rel = rec.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(rel <= 1e-10, "reconstruction error {rel} at n = {n}");
    }
}

#[test]
fn spectral_norm_is_transpose_invariant() {
    let mut rng = rng(0xAB);
    for case in 0..20 {
        let n = 2 + (case % 12);
        let a = random_matrix(&mut rng, n, n);
        let s1 = spectral_norm(&a).unwrap();
        let s2 = spectral_norm(&a.transpose()).unwrap();
        assert!((s1 - s2).abs() <= 1e-10 * s1.max(1.0));
    }
}

#[test]
fn numerical_rank_monotone_in_tolerance() {
    let mut rng = rng(0x7A77);
    for _ in 0..20 {
        let a = random_matrix(&mut rng, 10, 10);
        let f = svd(&a).unwrap();
        let tols = [1e-16, 1e-12, 1e-8, 1e-4, 1e-2, 1.0];
        let ranks: Vec<usize> = tols.iter().map(|&t| f.numerical_rank(t)).collect();
        for w in ranks.windows(2) {
            assert!(
                w[0] >= w[1],
                "rank must not increase with tolerance: {ranks:?}"
            );
        }
    }
}

#[test]
fn power_iteration_agrees_with_symmetric_svd_oracle() {
    // On a symmetric matrix the spectral radius equals the largest
    // singular value, read off the SVD as an independent oracle.
    let mut rng = rng(0xFACE);
    for case in 0..30 {
        let n = 2 + (case % 31);
        let m = random_spd(&mut rng, n);
        let oracle = svd(&m).unwrap().sigma()[0];
        let cfg = PowerConfig::default();
        let est = spectral_radius_estimate(|x| m.matvec(x).unwrap(), n, &cfg);
        let rel = (est.value - oracle).abs() / oracle;
        assert!(
            rel <= 1e-6,
            "n = {n}: estimate {} vs oracle {oracle}",
            est.value
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn market_matrix_round_trip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, rows, cols);
        let mut buf = Vec::new();
        market::write_matrix(&mut buf, &a).unwrap();
        let b: DenseMatrix<f64> = market::read_matrix(&buf[..]).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn market_vector_round_trip(n in 1usize..12, seed in 0u64..1000) {
        let mut r = rng(seed);
        let v = random_vector(&mut r, n);
        let mut buf = Vec::new();
        market::write_vector(&mut buf, &v).unwrap();
        let w: Vector<f64> = market::read_vector(&buf[..]).unwrap();
        prop_assert_eq!(v, w);
    }
}
