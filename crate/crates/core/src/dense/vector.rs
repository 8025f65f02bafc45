use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense real vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T> {
    entries: Vec<T>,
}

impl<T: Real> Vector<T> {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::param("vector must have length >= 1"));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![T::zero(); n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            entries: vec![T::one(); n],
        }
    }

    /// Builds a vector from a function of the index. The closure is trusted
    /// to produce finite values; use [`Vector::new`] for unchecked data.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Self {
        Self {
            entries: (0..n).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.entries.iter()
    }

    /// Euclidean norm, accumulated left to right.
    pub fn norm(&self) -> T {
        self.entries.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "dot of mismatched lengths");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "add of mismatched lengths");
        Self::from_fn(self.len(), |i| self.entries[i] + other.entries[i])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "sub of mismatched lengths");
        Self::from_fn(self.len(), |i| self.entries[i] - other.entries[i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.len(), |i| s * self.entries[i])
    }

    /// Returns `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "axpy of mismatched lengths");
        Self::from_fn(self.len(), |i| self.entries[i] + alpha * other.entries[i])
    }
}

impl<T: Real> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}
