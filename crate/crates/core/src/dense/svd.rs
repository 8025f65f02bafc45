use crate::error::{Error, Result};
use crate::scalar::{real, real_usize, Real};

use super::{DenseMatrix, Vector};

/// Relative off-diagonal threshold for sweep convergence: a column pair is
/// orthogonal enough once `|wᵢᵀwⱼ| <= ORTH_TOL * ‖wᵢ‖ ‖wⱼ‖`, which bounds
/// the off-diagonal entries of `UᵀU` by the same amount.
const ORTH_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 64;

/// Singular value decomposition `A = U Σ Vᵀ` with `Σ` sorted descending.
#[derive(Debug, Clone)]
pub struct SvdFactorization<T> {
    u: DenseMatrix<T>,
    sigma: Vector<T>,
    v: DenseMatrix<T>,
}

impl<T: Real> SvdFactorization<T> {
    pub fn u(&self) -> &DenseMatrix<T> {
        &self.u
    }

    /// Singular values in nonincreasing order.
    pub fn sigma(&self) -> &Vector<T> {
        &self.sigma
    }

    pub fn v(&self) -> &DenseMatrix<T> {
        &self.v
    }

    /// Default rank threshold factor `max(m, n) * eps_machine`.
    pub fn default_tol_factor(&self) -> T {
        real_usize::<T>(self.u.rows().max(self.v.rows())) * T::epsilon()
    }

    /// Count of singular values above `tol_factor * sigma_1`.
    pub fn numerical_rank(&self, tol_factor: T) -> usize {
        let cut = tol_factor * self.sigma[0];
        self.sigma.iter().filter(|&&s| s > cut).count()
    }

    /// Numerical rank under the default threshold.
    pub fn numerical_rank_default(&self) -> usize {
        self.numerical_rank(self.default_tol_factor())
    }

    /// Spectral-norm condition number `sigma_1 / sigma_r` truncated at the
    /// numerical rank `r`; for full-rank input this is `sigma_1 / sigma_n`.
    pub fn condition_number(&self) -> Result<T> {
        if self.sigma[0] <= T::zero() {
            return Err(Error::ZeroMatrix);
        }
        let r = self.numerical_rank_default();
        Ok(self.sigma[0] / self.sigma[r - 1])
    }
}

/// Largest singular value of `a`.
pub fn spectral_norm<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    Ok(svd(a)?.sigma()[0])
}

/// One-sided Jacobi SVD with cyclic sweeps.
///
/// Rotations orthogonalize the columns of a working copy of `A` while the
/// same rotations accumulate into `V`; at convergence the column norms are
/// the singular values and the normalized columns form `U`. The relative
/// convergence threshold keeps high relative accuracy on small singular
/// values, which the rank counts of the discretized integral equations
/// depend on.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Result<SvdFactorization<T>> {
    if a.rows() < a.cols() {
        let f = svd(&a.transpose())?;
        return Ok(SvdFactorization {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        });
    }

    let m = a.rows();
    let n = a.cols();
    // column-major working copies
    let mut w: Vec<Vec<T>> = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();

    let orth_tol = real::<T>(ORTH_TOL);
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        // refresh cached norms each sweep so rotation updates cannot drift
        let mut colsq: Vec<T> = w.iter().map(|c| sq_norm(c)).collect();
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let d = dot(&w[p], &w[q]);
                let bound = orth_tol * (colsq[p] * colsq[q]).sqrt();
                if d.abs() <= bound {
                    continue;
                }
                rotated = true;
                let (c, s, t) = rotation(colsq[p], colsq[q], d);
                {
                    let (wp, wq) = pair_mut(&mut w, p, q);
                    rotate(wp, wq, c, s);
                }
                {
                    let (vp, vq) = pair_mut(&mut v, p, q);
                    rotate(vp, vq, c, s);
                }
                colsq[p] = (colsq[p] - t * d).max(T::zero());
                colsq[q] = (colsq[q] + t * d).max(T::zero());
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = w.iter().map(|c| sq_norm(c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > T::zero() {
            u_cols.push(w[src].iter().map(|&x| x / s).collect());
        } else {
            u_cols.push(vec![T::zero(); m]);
            deficient.push(slot);
        }
    }
    complete_basis(&mut u_cols, &deficient);

    let u = DenseMatrix::from_fn(m, n, |i, j| u_cols[j][i]);
    let vmat = DenseMatrix::from_fn(n, n, |i, j| v[order[j]][i]);
    Ok(SvdFactorization {
        u,
        sigma: Vector::from_fn(n, |i| sigma[i]),
        v: vmat,
    })
}

fn sq_norm<T: Real>(c: &[T]) -> T {
    c.iter().map(|&x| x * x).sum()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Jacobi rotation zeroing the off-diagonal Gram entry `d` of a column pair
/// with squared norms `a` and `b`; returns `(cos, sin, tan)`.
fn rotation<T: Real>(a: T, b: T, d: T) -> (T, T, T) {
    let two = real::<T>(2.0);
    let zeta = (b - a) / (two * d);
    let t = if zeta >= T::zero() {
        T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
    } else {
        -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, c * t, t)
}

fn rotate<T: Real>(x: &mut [T], y: &mut [T], c: T, s: T) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let xv = *xi;
        let yv = *yi;
        *xi = c * xv - s * yv;
        *yi = s * xv + c * yv;
    }
}

fn pair_mut<T>(cols: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Replaces exactly-zero columns with unit vectors orthogonal to every
/// other column (modified Gram-Schmidt over canonical candidates).
fn complete_basis<T: Real>(u_cols: &mut [Vec<T>], deficient: &[usize]) {
    if deficient.is_empty() {
        return;
    }
    let m = u_cols[0].len();
    let half = real::<T>(0.5);
    for &slot in deficient {
        'candidates: for cand in 0..m {
            let mut v = vec![T::zero(); m];
            v[cand] = T::one();
            for _ in 0..2 {
                for (j, col) in u_cols.iter().enumerate() {
                    if j == slot {
                        continue;
                    }
                    let proj = dot(&v, col);
                    for (vi, &ci) in v.iter_mut().zip(col) {
                        *vi -= proj * ci;
                    }
                }
            }
            let norm = sq_norm(&v).sqrt();
            if norm > half {
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                u_cols[slot] = v;
                break 'candidates;
            }
        }
    }
}
