//! Diagnostics for the gradient and stabilized iterations: iteration
//! operators, SVD filter factors, filtered expansions and a-priori error
//! bounds.

use crate::dense::{spectral_norm, svd, DenseMatrix, SvdFactorization, Vector};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::solvers::{build_stabilized_operator, StabilizedOperator};

/// Degenerate-ratio cutoff for the geometric sum in the filter factors.
const GEOMETRIC_TOL: f64 = 1e-14;

/// Agreement required between `U` and `V` columns before a factorization
/// is accepted as coming from a symmetric PSD matrix. Columns with
/// `sigma_j < sqrt(eps) * sigma_1` are skipped by the check (their computed
/// `U` direction carries relative error of order `eps * sigma_1 / sigma_j`)
/// but still enter the expansion.
const SYMMETRY_TOL: f64 = 1e-4;

/// Filter factors `phi[i]` of the k-th stabilized iterate per singular
/// value, for stepsize `alpha` and stabilization weight `gamma`.
#[derive(Debug, Clone)]
pub struct FilterFactorTable<T> {
    pub sigma: Vector<T>,
    pub k: usize,
    pub alpha: T,
    pub gamma: T,
    pub phi: Vector<T>,
}

/// Inputs of the a-priori error bound.
///
/// `kappa_v` is the spectral condition number of the SVD factor `V`
/// (exactly 1 for an orthogonal matrix; recomputed from the factorization
/// as an orthogonality check and clamped to at least 1).
#[derive(Debug, Clone)]
pub struct BoundParameters<T> {
    pub kappa_v: T,
    pub sigma_min: T,
    pub contraction_factors: Vec<T>,
    pub initial_error: T,
}

impl<T: Real> BoundParameters<T> {
    /// Builds the bound inputs for one stepsize per iteration.
    pub fn from_steps(
        a: &DenseMatrix<T>,
        alphas: &[T],
        x0: &Vector<T>,
        x_star: &Vector<T>,
    ) -> Result<Self> {
        let f = svd(a)?;
        let sigma_min = *f
            .sigma()
            .as_slice()
            .last()
            .expect("factorization has at least one singular value");
        if sigma_min <= T::zero() {
            return Err(Error::param("error bound requires a nonsingular matrix"));
        }
        let kappa_v = kappa_of_orthogonal(f.v())?;
        let mut contraction_factors = Vec::with_capacity(alphas.len());
        for &alpha in alphas {
            contraction_factors.push(spectral_norm(&a.identity_minus_scaled(alpha)?)?);
        }
        Ok(Self {
            kappa_v,
            sigma_min,
            contraction_factors,
            initial_error: x0.sub(x_star).norm(),
        })
    }

    /// Constant-stepsize variant: `k` equal contraction factors.
    pub fn from_constant_step(
        a: &DenseMatrix<T>,
        alpha: T,
        k: usize,
        x0: &Vector<T>,
        x_star: &Vector<T>,
    ) -> Result<Self> {
        Self::from_steps(a, &vec![alpha; k], x0, x_star)
    }
}

/// Spectral condition number of a numerically orthogonal matrix, clamped
/// to at least 1.
fn kappa_of_orthogonal<T: Real>(v: &DenseMatrix<T>) -> Result<T> {
    let f = svd(v)?;
    let smin = *f.sigma().as_slice().last().expect("nonempty");
    if smin <= T::zero() {
        return Err(Error::ZeroMatrix);
    }
    Ok((f.sigma()[0] / smin).max(T::one()))
}

/// Iteration matrix `I - alpha A` of the gradient splitting
/// `M = I/alpha`, `N = I/alpha - A`.
pub fn gradient_iteration_matrix<T: Real>(a: &DenseMatrix<T>, alpha: T) -> Result<DenseMatrix<T>> {
    a.identity_minus_scaled(alpha)
}

/// Iteration operator `x -> M⁻¹ (I - alpha A) x` of the stabilized scheme,
/// applied through the Cholesky factor rather than densified.
pub fn stabilized_iteration_matrix<T: Real>(
    a: &DenseMatrix<T>,
    alpha: T,
    gamma: T,
) -> Result<StabilizedIterationOp<T>> {
    let b = Vector::zeros(a.rows());
    let op = build_stabilized_operator(a, &b, gamma, alpha)?;
    Ok(StabilizedIterationOp { op })
}

/// Linear operator wrapper around the stabilized splitting.
#[derive(Debug, Clone)]
pub struct StabilizedIterationOp<T> {
    op: StabilizedOperator<T>,
}

impl<T: Real> StabilizedIterationOp<T> {
    pub fn apply(&self, x: &Vector<T>) -> Vector<T> {
        self.op
            .apply_iteration_matrix(x)
            .expect("operator dimensions are fixed at construction")
    }

    pub fn n(&self) -> usize {
        self.op.n_matrix().rows()
    }
}

/// Ratio of the geometric series in the filter factor.
fn geometric_ratio<T: Real>(sigma: T, alpha: T, gamma: T) -> T {
    (T::one() - alpha * sigma) / (T::one() + gamma * sigma * sigma)
}

/// Geometric partial sum `(1 - r^k) / (1 - r)` with the `r -> 1` limit `k`.
fn geometric_sum<T: Real>(r: T, k: usize) -> T {
    if (T::one() - r).abs() < real::<T>(GEOMETRIC_TOL) {
        real::<T>(k as f64)
    } else {
        (T::one() - r.powi(k as i32)) / (T::one() - r)
    }
}

/// Filter factors of the k-th stabilized iterate:
///
/// ```text
/// phi_i = ((alpha sigma_i + gamma sigma_i²) / (1 + gamma sigma_i²))
///         * (1 - r_i^k) / (1 - r_i),
/// r_i = (1 - alpha sigma_i) / (1 + gamma sigma_i²)
/// ```
///
/// All factors tend to 1 as `gamma -> infinity`, where the iterate
/// coincides with the naive SVD solution.
pub fn filter_factors<T: Real>(
    sigma: &Vector<T>,
    alpha: T,
    gamma: T,
    k: usize,
) -> Result<FilterFactorTable<T>> {
    if k < 1 {
        return Err(Error::param("filter factors need k >= 1"));
    }
    if gamma.is_nan() || gamma <= T::zero() {
        return Err(Error::param("gamma must be positive"));
    }
    if sigma.iter().any(|&s| s <= T::zero()) {
        return Err(Error::param("filter factors need positive singular values"));
    }
    let phi = Vector::from_fn(sigma.len(), |i| {
        let s = sigma[i];
        let denom = T::one() + gamma * s * s;
        let leading = (alpha * s + gamma * s * s) / denom;
        leading * geometric_sum(geometric_ratio(s, alpha, gamma), k)
    });
    if phi.iter().any(|p| !p.is_finite()) {
        return Err(Error::param(
            "filter factors overflow: |ratio| > 1 combined with large k",
        ));
    }
    Ok(FilterFactorTable {
        sigma: sigma.clone(),
        k,
        alpha,
        gamma,
        phi,
    })
}

/// Checks that the well-resolved `U` and `V` columns agree, which holds
/// exactly when the factored matrix was symmetric positive semidefinite.
fn require_symmetric_psd<T: Real>(s: &SvdFactorization<T>, retained: usize) -> Result<()> {
    let tol = real::<T>(SYMMETRY_TOL);
    let floor = T::epsilon().sqrt() * s.sigma()[0];
    for j in 0..retained {
        if s.sigma()[j] < floor {
            break;
        }
        for i in 0..s.v().rows() {
            if (s.u().get(i, j) - s.v().get(i, j)).abs() > tol {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Filtered SVD expansion of the k-th stabilized iterate started at zero:
/// `x = sum_i phi_i (v_iᵀ b / sigma_i) v_i` over retained components.
///
/// The factorization must come from a symmetric PSD matrix (the expansion
/// is written in `V` alone); anything else reports [`Error::NotSymmetric`].
/// The coefficient is evaluated as `(phi_i / sigma_i) vᵀb` with the
/// division folded into the filter factor, which avoids amplifying noise
/// in `vᵀb` for tiny singular values.
pub fn svd_expansion_solve<T: Real>(
    s: &SvdFactorization<T>,
    b: &Vector<T>,
    alpha: T,
    gamma: T,
    k: usize,
) -> Result<Vector<T>> {
    if k < 1 {
        return Err(Error::param("expansion needs k >= 1"));
    }
    if gamma.is_nan() || gamma <= T::zero() {
        return Err(Error::param("gamma must be positive"));
    }
    let n = s.v().rows();
    if b.len() != n {
        return Err(Error::dims("svd_expansion_solve", "rhs length mismatch"));
    }
    let retained = s.numerical_rank_default();
    require_symmetric_psd(s, retained)?;

    let mut x = vec![T::zero(); n];
    for j in 0..retained {
        let sigma = s.sigma()[j];
        let denom = T::one() + gamma * sigma * sigma;
        // phi / sigma without the explicit division by sigma
        let psi = (alpha + gamma * sigma) / denom
            * geometric_sum(geometric_ratio(sigma, alpha, gamma), k);
        let vtb: T = (0..n).map(|i| s.v().get(i, j) * b[i]).sum();
        let coeff = psi * vtb;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += coeff * s.v().get(i, j);
        }
    }
    Ok(Vector::from_fn(n, |i| x[i]))
}

/// Unfiltered SVD solve with components below the rank tolerance excluded.
#[derive(Debug, Clone)]
pub struct NaiveSvdSolution<T> {
    pub x: Vector<T>,
    /// Number of singular components excluded by the rank tolerance.
    pub excluded: usize,
}

/// Naive SVD solution `sum_i (v_iᵀ b / sigma_i) v_i` over retained
/// components; unstable for nearly singular matrices, which is exactly the
/// `gamma -> infinity` limit of the stabilized iterate.
pub fn naive_svd_solution<T: Real>(
    s: &SvdFactorization<T>,
    b: &Vector<T>,
) -> Result<NaiveSvdSolution<T>> {
    let n = s.v().rows();
    if b.len() != n {
        return Err(Error::dims("naive_svd_solution", "rhs length mismatch"));
    }
    let retained = s.numerical_rank_default();
    let mut x = vec![T::zero(); n];
    for j in 0..retained {
        let vtb: T = (0..n).map(|i| s.v().get(i, j) * b[i]).sum();
        let coeff = vtb / s.sigma()[j];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += coeff * s.v().get(i, j);
        }
    }
    Ok(NaiveSvdSolution {
        x: Vector::from_fn(n, |i| x[i]),
        excluded: s.sigma().len() - retained,
    })
}

/// A-priori error bound after `k` stabilized iterations:
///
/// ```text
/// (kappa(V) / (1 + gamma sigma_min²))^k * prod_i ‖I - alpha_i A‖ * e0
/// ```
///
/// Constant-stepsize callers pass `k` equal contraction factors.
pub fn error_bound<T: Real>(p: &BoundParameters<T>, gamma: T, k: usize) -> T {
    assert!(k >= 1, "error bound needs k >= 1");
    assert_eq!(
        p.contraction_factors.len(),
        k,
        "one contraction factor per iteration"
    );
    let damping = p.kappa_v / (T::one() + gamma * p.sigma_min * p.sigma_min);
    let product = p
        .contraction_factors
        .iter()
        .fold(T::one(), |acc, &f| acc * f);
    damping.powi(k as i32) * product * p.initial_error
}

/// Scalar convergence-region test for the constant-stepsize bound:
/// `(kappa(V) / (1 + gamma sigma_min²)) * ‖I - alpha A‖ < 1`.
pub fn convergence_region_check<T: Real>(a: &DenseMatrix<T>, alpha: T, gamma: T) -> Result<bool> {
    let f = svd(a)?;
    let sigma_min = *f.sigma().as_slice().last().expect("nonempty");
    if sigma_min <= T::zero() {
        return Err(Error::param("region check requires a nonsingular matrix"));
    }
    let kappa_v = kappa_of_orthogonal(f.v())?;
    let contraction = spectral_norm(&a.identity_minus_scaled(alpha)?)?;
    Ok(kappa_v / (T::one() + gamma * sigma_min * sigma_min) * contraction < T::one())
}
