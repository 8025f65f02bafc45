//! Dense linear algebra kernels plus a residual-stabilized variant of the
//! gradient method for linear systems `Ax = b`.
//!
//! The stabilized iteration solves
//!
//! ```text
//! (I + gamma AᵀA) x[k+1] = (I - alpha_k A) x[k] + alpha_k b + gamma Aᵀb
//! ```
//!
//! for a stabilization weight `gamma > 0`. Unlike the plain gradient step
//! `x[k+1] = x[k] - alpha_k (A x[k] - b)`, it converges for any nonsingular
//! `A` and any stepsize once `gamma` is large enough, and for very large
//! `gamma` it reaches the solution in a single iteration.
//!
//! The crate is organized by role:
//!
//! * [`dense`] — matrices, vectors, Cholesky, one-sided Jacobi SVD,
//!   power-iteration spectral-radius estimation, Matrix Market I/O;
//! * [`solvers`] — the gradient and stabilized iterations, stepsize
//!   strategies and stopping rules;
//! * [`analysis`] — iteration operators, SVD filter factors, filtered
//!   expansions and a-priori error bounds;
//! * [`problems`] — generators for the benchmark systems (two 4x4
//!   matrices, diagonal quadratics, shaw/heat/gravity discretizations and a
//!   2-D reaction-diffusion grid).
//!
//! Everything numeric is generic over the scalar through [`Real`];
//! the aliases below fix the common precisions.

pub mod analysis;
pub mod dense;
pub mod error;
pub mod problems;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision dense matrix.
pub type Matrix64 = dense::DenseMatrix<f64>;
/// Double-precision dense vector.
pub type Vector64 = dense::Vector<f64>;
/// Single-precision dense matrix.
pub type Matrix32 = dense::DenseMatrix<f32>;
/// Single-precision dense vector.
pub type Vector32 = dense::Vector<f32>;
