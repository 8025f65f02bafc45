#![allow(dead_code)] // each suite uses its own subset of these helpers
#![allow(clippy::needless_range_loop)]

//! Shared oracles and generators for the property suites. Everything here
//! is independent of the implementation paths it checks: the linear-system
//! oracle is Gaussian elimination with partial pivoting, and random
//! instances come from a seeded generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabgrad_core::dense::{DenseMatrix, Vector};

/// Gaussian elimination with partial pivoting; `None` for (numerically)
/// singular input.
pub fn gaussian_elimination_solve(a: &DenseMatrix<f64>, b: &Vector<f64>) -> Option<Vector<f64>> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| {
            m[p][col]
                .abs()
                .partial_cmp(&m[q][col].abs())
                .expect("finite")
        })?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for k in (i + 1)..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(Vector::from_fn(n, |i| x[i]))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random matrix with entries uniform in `[-1, 1]`.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector<f64> {
    Vector::from_fn(n, |_| rng.random_range(-1.0..1.0))
}

/// Random SPD matrix `BᵀB + I`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let b = random_matrix(rng, n, n);
    let btb = b.transpose().matmul(&b).unwrap();
    btb.add(&DenseMatrix::identity(n)).unwrap()
}

/// Random nonsingular matrix with smallest singular value clamped to
/// `sigma_floor` (clamp applied through the SVD).
pub fn random_regularized(rng: &mut ChaCha8Rng, n: usize, sigma_floor: f64) -> DenseMatrix<f64> {
    let a = random_matrix(rng, n, n);
    let f = stabgrad_core::dense::svd(&a).expect("svd of random matrix");
    let r = f.sigma().len();
    DenseMatrix::from_fn(n, n, |i, j| {
        (0..r)
            .map(|k| f.u().get(i, k) * f.sigma()[k].max(sigma_floor) * f.v().get(j, k))
            .sum()
    })
}

/// Relative euclidean distance `‖x - y‖ / max(‖y‖, floor)`.
pub fn rel_err(x: &Vector<f64>, y: &Vector<f64>) -> f64 {
    x.sub(y).norm() / y.norm().max(1e-300)
}
