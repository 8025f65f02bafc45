use crate::error::{Error, Result};
use crate::scalar::{real, Real};

use super::{DenseMatrix, Vector};

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = M`.
///
/// The factor of the stabilized operator is computed once per solve and
/// reused across every iteration.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<T> {
    lower: DenseMatrix<T>,
}

impl<T: Real> CholeskyFactor<T> {
    /// Factors a symmetric positive definite matrix.
    ///
    /// Symmetry is checked to `1e-12` relative to the largest entry;
    /// a non-positive pivot reports [`Error::NotPositiveDefinite`].
    pub fn new(m: &DenseMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("cholesky", "matrix must be square"));
        }
        let n = m.rows();
        let scale = m.max_abs();
        let sym_tol = real::<T>(1e-12) * scale;
        for i in 0..n {
            for j in (i + 1)..n {
                if (m.get(i, j) - m.get(j, i)).abs() > sym_tol {
                    return Err(Error::NotSymmetric);
                }
            }
        }

        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= T::zero() || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self {
            lower: DenseMatrix::new(n, n, l)?,
        })
    }

    pub fn lower(&self) -> &DenseMatrix<T> {
        &self.lower
    }

    pub fn n(&self) -> usize {
        self.lower.rows()
    }

    /// Solves `(L Lᵀ) y = rhs` by forward then back substitution.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, rhs: &Vector<T>) -> Result<Vector<T>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::dims(
                "cholesky_solve",
                format!("factor is {}x{}, rhs has length {}", n, n, rhs.len()),
            ));
        }
        let l = &self.lower;
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= l.get(i, k) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l.get(k, i) * x[k];
            }
            x[i] = s / l.get(i, i);
        }
        Ok(Vector::from_fn(n, |i| x[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factors_to_identity() {
        let f = CholeskyFactor::new(&DenseMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(f.lower(), &DenseMatrix::identity(2));
        let rhs = Vector::new(vec![3.0, -1.5]).unwrap();
        assert_eq!(f.solve(&rhs).unwrap().as_slice(), rhs.as_slice());
    }

    #[test]
    fn small_spd_factor_reconstructs() {
        let m = DenseMatrix::<f64>::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let f = CholeskyFactor::new(&m).unwrap();
        let l = f.lower();
        assert!((l.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.get(1, 0) - 1.0).abs() < 1e-15);
        assert!((l.get(1, 1) - 2.0f64.sqrt()).abs() < 1e-15);
        // reconstruction oracle: L Lᵀ must reproduce m
        let rec = l.matmul(&l.transpose()).unwrap();
        let err = rec.sub(&m).unwrap().frobenius_norm() / m.frobenius_norm();
        assert!(err <= 1e-12, "relative reconstruction error {err}");
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            CholeskyFactor::new(&m),
            Err(Error::NotPositiveDefinite { index: 0 })
        ));
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![1.0, 3.0]]).unwrap();
        assert!(matches!(CholeskyFactor::new(&m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn zero_rhs_solves_to_zero() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let f = CholeskyFactor::new(&m).unwrap();
        let x = f.solve(&Vector::zeros(2)).unwrap();
        assert_eq!(x.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn solve_rejects_wrong_length() {
        let f = CholeskyFactor::new(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert!(f.solve(&Vector::ones(2)).is_err());
    }
}
