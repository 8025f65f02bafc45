//! Dense real matrix/vector storage and factorizations.
//!
//! All values are immutable after construction and all operations are pure
//! functions of their inputs, so everything here can be shared freely
//! between threads. Accumulations run in a fixed order (row-major,
//! left-to-right) so repeated runs are bit-identical.

mod cholesky;
pub mod market;
mod matrix;
mod power;
mod svd;
mod vector;

pub use cholesky::CholeskyFactor;
pub use matrix::DenseMatrix;
pub use power::{spectral_radius_estimate, PowerConfig, SpectralRadiusEstimate};
pub use svd::{spectral_norm, svd, SvdFactorization};
pub use vector::Vector;
