use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{real, Real};

use super::Vector;

/// Parameters for [`spectral_radius_estimate`].
#[derive(Debug, Clone)]
pub struct PowerConfig<T> {
    /// Independent random unit starts; the estimate is the max over them.
    pub restarts: usize,
    /// Relative stall tolerance on the magnitude estimate.
    pub tol: T,
    /// Budget of operator applications per restart.
    pub max_iters: usize,
    /// Seed for the start vectors.
    pub seed: u64,
}

impl<T: Real> Default for PowerConfig<T> {
    fn default() -> Self {
        Self {
            restarts: 8,
            tol: real(1e-9),
            max_iters: 10_000,
            seed: 42,
        }
    }
}

/// Result of a power-iteration run. Non-convergence is diagnostic, not
/// fatal: the best estimate is still reported.
#[derive(Debug, Clone, Copy)]
pub struct SpectralRadiusEstimate<T> {
    pub value: T,
    pub converged: bool,
}

/// Estimates the spectral radius `max |lambda_i|` of a linear operator by
/// power iteration.
///
/// Each restart draws a random unit vector and tracks the two-step growth
/// `sqrt(‖apply(apply(x))‖ / ‖x‖)`, which also converges for a dominant
/// complex-conjugate pair where the one-step Rayleigh quotient oscillates.
pub fn spectral_radius_estimate<T: Real>(
    apply: impl Fn(&Vector<T>) -> Vector<T>,
    n: usize,
    config: &PowerConfig<T>,
) -> SpectralRadiusEstimate<T> {
    assert!(n >= 1, "operator dimension must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best = T::zero();
    let mut any_converged = false;
    let double_steps = (config.max_iters / 2).max(1);

    for _ in 0..config.restarts.max(1) {
        let mut x = random_unit(&mut rng, n);
        let mut prev: Option<T> = None;
        let mut est = T::zero();
        let mut converged = false;
        for _ in 0..double_steps {
            let y = apply(&x);
            let z = apply(&y);
            let nz = z.norm();
            if !nz.is_finite() {
                break;
            }
            if nz == T::zero() {
                est = T::zero();
                converged = true;
                break;
            }
            est = nz.sqrt();
            if let Some(p) = prev {
                if (est - p).abs() <= config.tol * est.max(T::one()) {
                    converged = true;
                    break;
                }
            }
            prev = Some(est);
            x = z.scale(T::one() / nz);
        }
        best = best.max(est);
        any_converged |= converged;
    }

    SpectralRadiusEstimate {
        value: best,
        converged: any_converged,
    }
}

fn random_unit<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vector<T> {
    loop {
        let v = Vector::from_fn(n, |_| real::<T>(rng.random_range(-1.0..1.0)));
        let norm = v.norm();
        if norm > real(1e-3) {
            return v.scale(T::one() / norm);
        }
    }
}
