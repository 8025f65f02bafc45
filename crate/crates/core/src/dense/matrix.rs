use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Vector;

/// Dense real matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting shape/entry errors.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("matrix dimensions must be >= 1"));
        }
        if rows * cols != data.len() {
            return Err(Error::dims(
                "DenseMatrix::new",
                format!(
                    "{}x{} needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    data.len()
                ),
            ));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from explicit rows; rows must all share one length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::param("matrix needs at least one row"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dims("DenseMatrix::from_rows", "ragged rows"));
        }
        let data: Vec<T> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from a function of the index pair, row-major order.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Matrix-vector product `A x` with deterministic row-major,
    /// left-to-right accumulation.
    pub fn matvec(&self, x: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != x.len() {
            return Err(Error::dims(
                "matvec",
                format!(
                    "matrix is {}x{}, vector has length {}",
                    self.rows,
                    self.cols,
                    x.len()
                ),
            ));
        }
        let xs = x.as_slice();
        Ok(Vector::from_fn(self.rows, |i| {
            self.row(i).iter().zip(xs).map(|(&a, &b)| a * b).sum::<T>()
        }))
    }

    /// Transposed product `Aᵀ x` without materializing the transpose.
    pub fn matvec_transpose(&self, x: &Vector<T>) -> Result<Vector<T>> {
        if self.rows != x.len() {
            return Err(Error::dims(
                "matvec_transpose",
                format!(
                    "matrix is {}x{}, vector has length {}",
                    self.rows,
                    self.cols,
                    x.len()
                ),
            ));
        }
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (j, &a) in self.row(i).iter().enumerate() {
                out[j] += a * xi;
            }
        }
        Ok(Vector::from_fn(self.cols, |j| out[j]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matmul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += aik * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims("add", "shape mismatch"));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims("sub", "shape mismatch"));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| s * self.get(i, j))
    }

    /// Returns `I - alpha * self` for square matrices.
    pub fn identity_minus_scaled(&self, alpha: T) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::dims(
                "identity_minus_scaled",
                "matrix must be square",
            ));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            let id = if i == j { T::one() } else { T::zero() };
            id - alpha * self.get(i, j)
        }))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_fn(self.rows, |i| self.get(i, j))
    }
}

impl<T: Real> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}
