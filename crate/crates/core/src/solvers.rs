//! Gradient and stabilized gradient iterations for `Ax = b`.
//!
//! The plain gradient scheme steps `x <- x - alpha_k g` where `g` is the
//! residual `Ax - b` ([`SystemForm::LinearSystem`]) or the gradient
//! `2(Ax + b)` of the quadratic `<Ax, x> + 2<b, x>`
//! ([`SystemForm::BeckQuadratic`]). The stabilized scheme instead solves
//!
//! ```text
//! (I + gamma AᵀA) x[k+1] = (I - alpha_k A) x[k] + alpha_k b + gamma Aᵀb
//! ```
//!
//! reusing one Cholesky factorization of `M = I + gamma AᵀA` for every
//! iteration; only `N = I - alpha_k A` and `c = alpha_k b + gamma Aᵀb`
//! depend on the stepsize.

use std::sync::Arc;

use crate::dense::{CholeskyFactor, DenseMatrix, Vector};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Residual blow-up factor beyond which a run is declared divergent.
const DIVERGENCE_FACTOR: f64 = 1e12;

/// Smallest admissible backtracking step before reporting underflow.
const STEP_FLOOR: f64 = 1e-300;

/// Which first-order scheme the gradient solver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemForm {
    /// Steps along the residual `Ax - b`.
    LinearSystem,
    /// Steps along `2(Ax + b)`, the gradient of `<Ax, x> + 2<b, x>`.
    BeckQuadratic,
}

/// Stepsize selection per iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeStrategy<T> {
    /// Fixed stepsize; any finite value, positive or negative.
    Constant(T),
    /// `alpha = ‖g‖² / (2 gᵀ A g)` along the current direction `g`.
    ExactLineSearch,
    /// Armijo backtracking on the quadratic `<Ax, x> + 2<b, x>`: the step is
    /// `s * shrink^j` for the first `j` with sufficient decrease.
    Backtracking { s: T, slope_coeff: T, shrink: T },
}

impl<T: Real> StepsizeStrategy<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepsizeStrategy::Constant(alpha) => {
                if !alpha.is_finite() {
                    return Err(Error::param("constant stepsize must be finite"));
                }
            }
            StepsizeStrategy::ExactLineSearch => {}
            StepsizeStrategy::Backtracking {
                s,
                slope_coeff,
                shrink,
            } => {
                if s <= T::zero() {
                    return Err(Error::param("backtracking initial step must be > 0"));
                }
                if slope_coeff <= T::zero() || slope_coeff >= T::one() {
                    return Err(Error::param(
                        "backtracking slope coefficient must be in (0, 1)",
                    ));
                }
                if shrink <= T::zero() || shrink >= T::one() {
                    return Err(Error::param("backtracking shrink factor must be in (0, 1)"));
                }
            }
        }
        Ok(())
    }
}

/// Stopping rule evaluated after every update.
#[derive(Debug, Clone, PartialEq)]
pub enum StopRule<T> {
    /// `‖b - Ax‖ / ‖b - Ax0‖ <= eps`; an exactly solved start counts as
    /// converged immediately.
    RelativeResidual(T),
    /// `‖x* - x‖ / ‖x*‖ < eps` against a known exact solution.
    RelativeError { eps: T, x_star: Vector<T> },
    /// `‖2(Ax + b)‖ <= eps`.
    GradientNorm(T),
    /// `‖Ax - b‖ <= eps`.
    AbsoluteResidual(T),
}

impl<T: Real> StopRule<T> {
    pub fn validate(&self) -> Result<()> {
        let eps = match self {
            StopRule::RelativeResidual(e)
            | StopRule::GradientNorm(e)
            | StopRule::AbsoluteResidual(e) => *e,
            StopRule::RelativeError { eps, .. } => *eps,
        };
        if eps <= T::zero() {
            return Err(Error::param("stop tolerance must be > 0"));
        }
        Ok(())
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    Diverged,
}

/// Outcome of a solve: final iterate plus per-iteration history.
///
/// `residual_history[j] = ‖A x[j] - b‖` with index 0 the initial iterate,
/// so its length is `iterations + 1`. `error_history` is recorded when the
/// stop rule carries the exact solution.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub final_x: Vector<T>,
    pub residual_history: Vec<T>,
    pub error_history: Option<Vec<T>>,
    pub stop_reason: StopReason,
}

impl<T: Real> SolveReport<T> {
    pub fn final_residual(&self) -> T {
        *self
            .residual_history
            .last()
            .expect("history is never empty")
    }

    pub fn final_error(&self) -> Option<T> {
        self.error_history
            .as_ref()
            .map(|h| *h.last().expect("history"))
    }
}

/// Stabilized operator data: the factored `M = I + gamma AᵀA` together
/// with `N = I - alpha A` and `c = alpha b + gamma Aᵀb`.
///
/// `M` is symmetric positive definite for every `gamma > 0` no matter the
/// structure of `A`, so the Cholesky factorization cannot fail for valid
/// input. The factor is shared; re-deriving the operator for a new
/// stepsize rebuilds only `N` and `c`.
#[derive(Debug, Clone)]
pub struct StabilizedOperator<T> {
    m_factor: Arc<CholeskyFactor<T>>,
    n_matrix: DenseMatrix<T>,
    c: Vector<T>,
    gamma: T,
    alpha: T,
}

impl<T: Real> StabilizedOperator<T> {
    pub fn m_factor(&self) -> &CholeskyFactor<T> {
        &self.m_factor
    }

    pub fn n_matrix(&self) -> &DenseMatrix<T> {
        &self.n_matrix
    }

    pub fn c(&self) -> &Vector<T> {
        &self.c
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// One update `x <- M⁻¹ (N x + c)`.
    pub fn step(&self, x: &Vector<T>) -> Result<Vector<T>> {
        let rhs = self.n_matrix.matvec(x)?.add(&self.c);
        self.m_factor.solve(&rhs)
    }

    /// Applies the iteration operator `M⁻¹ N` without densifying it.
    pub fn apply_iteration_matrix(&self, x: &Vector<T>) -> Result<Vector<T>> {
        self.m_factor.solve(&self.n_matrix.matvec(x)?)
    }

    /// Same factored `M`, new `N` and `c` for a different stepsize.
    pub fn with_alpha(&self, a: &DenseMatrix<T>, b: &Vector<T>, alpha: T) -> Result<Self> {
        let n_matrix = a.identity_minus_scaled(alpha)?;
        let atb = a.matvec_transpose(b)?;
        let c = b.scale(alpha).axpy(self.gamma, &atb);
        Ok(Self {
            m_factor: Arc::clone(&self.m_factor),
            n_matrix,
            c,
            gamma: self.gamma,
            alpha,
        })
    }
}

/// Assembles and factors the stabilized operator for `gamma > 0`.
///
/// `AᵀA` is symmetrized explicitly before adding the identity so the
/// Cholesky symmetry check cannot trip on accumulation order.
pub fn build_stabilized_operator<T: Real>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    gamma: T,
    alpha: T,
) -> Result<StabilizedOperator<T>> {
    if !a.is_square() {
        return Err(Error::dims(
            "build_stabilized_operator",
            "matrix must be square",
        ));
    }
    if a.rows() != b.len() {
        return Err(Error::dims(
            "build_stabilized_operator",
            format!(
                "matrix is {}x{}, rhs has length {}",
                a.rows(),
                a.cols(),
                b.len()
            ),
        ));
    }
    if gamma <= T::zero() || !gamma.is_finite() {
        return Err(Error::param("gamma must be positive and finite"));
    }
    let n = a.rows();
    let ata = a.transpose().matmul(a)?;
    let half = real::<T>(0.5);
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        let sym = half * (ata.get(i, j) + ata.get(j, i));
        let id = if i == j { T::one() } else { T::zero() };
        id + gamma * sym
    });
    let m_factor = Arc::new(CholeskyFactor::new(&m)?);
    let n_matrix = a.identity_minus_scaled(alpha)?;
    let atb = a.matvec_transpose(b)?;
    let c = b.scale(alpha).axpy(gamma, &atb);
    Ok(StabilizedOperator {
        m_factor,
        n_matrix,
        c,
        gamma,
        alpha,
    })
}

/// Exact line-search stepsize `‖g‖² / (2 gᵀ A g)` along direction `g`.
pub fn exact_line_stepsize<T: Real>(a: &DenseMatrix<T>, g: &Vector<T>) -> Result<T> {
    let ag = a.matvec(g)?;
    let curvature = g.dot(&ag);
    if curvature <= T::zero() {
        return Err(Error::NonPositiveCurvature);
    }
    Ok(g.dot(g) / (real::<T>(2.0) * curvature))
}

/// Armijo backtracking: the largest `t = s * shrink^j`, `j >= 0`, with
/// `f(x - t grad) <= f(x) - slope_coeff * t * ‖grad‖²`.
pub fn backtracking_stepsize<T: Real>(
    f: impl Fn(&Vector<T>) -> T,
    grad: &Vector<T>,
    x: &Vector<T>,
    s: T,
    slope_coeff: T,
    shrink: T,
) -> Result<T> {
    let fx = f(x);
    let gg = grad.dot(grad);
    let floor = real::<T>(STEP_FLOOR);
    let mut t = s;
    loop {
        let trial = x.axpy(-t, grad);
        if f(&trial) <= fx - slope_coeff * t * gg {
            return Ok(t);
        }
        t *= shrink;
        if t < floor {
            return Err(Error::StepUnderflow);
        }
    }
}

/// Evaluates `f(x) = <Ax, x> + 2 <b, x>`.
pub fn quadratic_value<T: Real>(a: &DenseMatrix<T>, b: &Vector<T>, x: &Vector<T>) -> T {
    let ax = a.matvec(x).expect("dimensions checked by caller");
    ax.dot(x) + real::<T>(2.0) * b.dot(x)
}

/// Evaluates a stop rule at `x` given the initial iterate `x0`.
pub fn evaluate_stop<T: Real>(
    rule: &StopRule<T>,
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x: &Vector<T>,
    x0: &Vector<T>,
) -> Result<bool> {
    rule.validate()?;
    match rule {
        StopRule::RelativeResidual(eps) => {
            let r0 = a.matvec(x0)?.sub(b).norm();
            if r0 == T::zero() {
                return Ok(true);
            }
            Ok(a.matvec(x)?.sub(b).norm() / r0 <= *eps)
        }
        StopRule::RelativeError { eps, x_star } => {
            if x_star.len() != x.len() {
                return Err(Error::MissingExactSolution);
            }
            let denom = x_star.norm();
            let err = x_star.sub(x).norm();
            // zero exact solution: fall back to the absolute error
            Ok(if denom > T::zero() {
                err / denom < *eps
            } else {
                err < *eps
            })
        }
        StopRule::GradientNorm(eps) => {
            let g = a.matvec(x)?.add(b).scale(real::<T>(2.0));
            Ok(g.norm() <= *eps)
        }
        StopRule::AbsoluteResidual(eps) => Ok(a.matvec(x)?.sub(b).norm() <= *eps),
    }
}

/// Shared per-iteration bookkeeping for both solvers.
struct RunState<T> {
    residual_history: Vec<T>,
    error_history: Option<Vec<T>>,
    r0: T,
    x_star_norm: T,
}

impl<T: Real> RunState<T> {
    fn new(a: &DenseMatrix<T>, b: &Vector<T>, x0: &Vector<T>, stop: &StopRule<T>) -> Result<Self> {
        let r0 = a.matvec(x0)?.sub(b).norm();
        let (error_history, x_star_norm) = match stop {
            StopRule::RelativeError { x_star, .. } => {
                if x_star.len() != x0.len() {
                    return Err(Error::MissingExactSolution);
                }
                (Some(vec![x_star.sub(x0).norm()]), x_star.norm())
            }
            _ => (None, T::zero()),
        };
        Ok(Self {
            residual_history: vec![r0],
            error_history,
            r0,
            x_star_norm,
        })
    }

    /// Records residual/error at the new iterate; returns the residual.
    fn record(
        &mut self,
        a: &DenseMatrix<T>,
        b: &Vector<T>,
        x: &Vector<T>,
        stop: &StopRule<T>,
    ) -> Result<T> {
        let r = a.matvec(x)?.sub(b).norm();
        self.residual_history.push(r);
        if let (Some(hist), StopRule::RelativeError { x_star, .. }) =
            (&mut self.error_history, stop)
        {
            hist.push(x_star.sub(x).norm());
        }
        Ok(r)
    }

    fn stop_holds(
        &self,
        a: &DenseMatrix<T>,
        b: &Vector<T>,
        x: &Vector<T>,
        stop: &StopRule<T>,
    ) -> Result<bool> {
        Ok(match stop {
            StopRule::RelativeResidual(eps) => {
                if self.r0 == T::zero() {
                    true
                } else {
                    *self.residual_history.last().expect("nonempty") / self.r0 <= *eps
                }
            }
            StopRule::RelativeError { eps, .. } => {
                let e = *self
                    .error_history
                    .as_ref()
                    .and_then(|h| h.last())
                    .expect("error history present for RelativeError");
                if self.x_star_norm > T::zero() {
                    e / self.x_star_norm < *eps
                } else {
                    e < *eps
                }
            }
            StopRule::GradientNorm(eps) => a.matvec(x)?.add(b).scale(real::<T>(2.0)).norm() <= *eps,
            StopRule::AbsoluteResidual(eps) => {
                *self.residual_history.last().expect("nonempty") <= *eps
            }
        })
    }

    fn diverged(&self, r: T) -> bool {
        !r.is_finite() || (self.r0 > T::zero() && r > real::<T>(DIVERGENCE_FACTOR) * self.r0)
    }

    fn finish(
        self,
        iterations: usize,
        final_x: Vector<T>,
        stop_reason: StopReason,
    ) -> SolveReport<T> {
        SolveReport {
            iterations,
            final_x,
            residual_history: self.residual_history,
            error_history: self.error_history,
            stop_reason,
        }
    }
}

fn check_system<T: Real>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    op: &'static str,
) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(op, "matrix must be square"));
    }
    if a.rows() != b.len() || a.rows() != x0.len() {
        return Err(Error::dims(
            op,
            format!(
                "matrix is {}x{}, b has length {}, x0 has length {}",
                a.rows(),
                a.cols(),
                b.len(),
                x0.len()
            ),
        ));
    }
    Ok(())
}

/// Classical gradient iteration `x <- x - alpha_k g`.
///
/// In [`SystemForm::LinearSystem`] the direction is the residual `Ax - b`;
/// in [`SystemForm::BeckQuadratic`] it is `2(Ax + b)`, the gradient of
/// `<Ax, x> + 2<b, x>`, with the exact-line and backtracking searches
/// evaluated on that quadratic. A zero direction before convergence
/// returns `Converged` at the current iterate; non-positive curvature or a
/// backtracking underflow aborts the run as `Diverged`.
pub fn gradient_solve<T: Real>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    step: &StepsizeStrategy<T>,
    stop: &StopRule<T>,
    k_max: usize,
    mode: SystemForm,
) -> Result<SolveReport<T>> {
    check_system(a, b, x0, "gradient_solve")?;
    step.validate()?;
    stop.validate()?;
    if mode == SystemForm::LinearSystem {
        if let StepsizeStrategy::Backtracking { .. } = step {
            return Err(Error::param(
                "backtracking line search is defined on the quadratic form; use BeckQuadratic mode",
            ));
        }
    }

    let mut state = RunState::new(a, b, x0, stop)?;
    let mut x = x0.clone();
    if state.stop_holds(a, b, &x, stop)? {
        return Ok(state.finish(0, x, StopReason::Converged));
    }

    for k in 1..=k_max {
        let g = match mode {
            SystemForm::LinearSystem => a.matvec(&x)?.sub(b),
            SystemForm::BeckQuadratic => a.matvec(&x)?.add(b).scale(real::<T>(2.0)),
        };
        if g.norm() == T::zero() {
            return Ok(state.finish(k - 1, x, StopReason::Converged));
        }
        let alpha = match *step {
            StepsizeStrategy::Constant(alpha) => alpha,
            StepsizeStrategy::ExactLineSearch => match exact_line_stepsize(a, &g) {
                Ok(alpha) => alpha,
                Err(Error::NonPositiveCurvature) => {
                    return Ok(state.finish(k - 1, x, StopReason::Diverged));
                }
                Err(e) => return Err(e),
            },
            StepsizeStrategy::Backtracking {
                s,
                slope_coeff,
                shrink,
            } => {
                match backtracking_stepsize(
                    |y| quadratic_value(a, b, y),
                    &g,
                    &x,
                    s,
                    slope_coeff,
                    shrink,
                ) {
                    Ok(alpha) => alpha,
                    Err(Error::StepUnderflow) => {
                        return Ok(state.finish(k - 1, x, StopReason::Diverged));
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        x = x.axpy(-alpha, &g);
        let r = state.record(a, b, &x, stop)?;
        if state.diverged(r) {
            return Ok(state.finish(k, x, StopReason::Diverged));
        }
        if state.stop_holds(a, b, &x, stop)? {
            return Ok(state.finish(k, x, StopReason::Converged));
        }
    }
    Ok(state.finish(k_max, x, StopReason::MaxIterations))
}

/// Stabilized gradient iteration `x <- M⁻¹ (N_k x + c_k)`.
///
/// The factorization of `M = I + gamma AᵀA` happens once; with a
/// non-constant stepsize only `N_k` and `c_k` are rebuilt each iteration.
/// The exact line search evaluates the stepsize along the residual
/// `Ax - b`, while backtracking searches the quadratic `<Ax, x> + 2<b, x>`
/// along its gradient.
pub fn stabilized_solve<T: Real>(
    a: &DenseMatrix<T>,
    b: &Vector<T>,
    x0: &Vector<T>,
    gamma: T,
    step: &StepsizeStrategy<T>,
    stop: &StopRule<T>,
    k_max: usize,
) -> Result<SolveReport<T>> {
    check_system(a, b, x0, "stabilized_solve")?;
    step.validate()?;
    stop.validate()?;

    let mut state = RunState::new(a, b, x0, stop)?;
    let mut x = x0.clone();
    if state.stop_holds(a, b, &x, stop)? {
        return Ok(state.finish(0, x, StopReason::Converged));
    }

    let alpha0 = match *step {
        StepsizeStrategy::Constant(alpha) => alpha,
        _ => T::zero(), // replaced before the first step
    };
    let base = build_stabilized_operator(a, b, gamma, alpha0)?;

    for k in 1..=k_max {
        let next = match *step {
            StepsizeStrategy::Constant(_) => base.step(&x)?,
            StepsizeStrategy::ExactLineSearch => {
                let g = a.matvec(&x)?.sub(b);
                if g.norm() == T::zero() {
                    return Ok(state.finish(k - 1, x, StopReason::Converged));
                }
                let alpha = match exact_line_stepsize(a, &g) {
                    Ok(alpha) => alpha,
                    Err(Error::NonPositiveCurvature) => {
                        return Ok(state.finish(k - 1, x, StopReason::Diverged));
                    }
                    Err(e) => return Err(e),
                };
                base.with_alpha(a, b, alpha)?.step(&x)?
            }
            StepsizeStrategy::Backtracking {
                s,
                slope_coeff,
                shrink,
            } => {
                let g = a.matvec(&x)?.add(b).scale(real::<T>(2.0));
                if g.norm() == T::zero() {
                    return Ok(state.finish(k - 1, x, StopReason::Converged));
                }
                let alpha = match backtracking_stepsize(
                    |y| quadratic_value(a, b, y),
                    &g,
                    &x,
                    s,
                    slope_coeff,
                    shrink,
                ) {
                    Ok(alpha) => alpha,
                    Err(Error::StepUnderflow) => {
                        return Ok(state.finish(k - 1, x, StopReason::Diverged));
                    }
                    Err(e) => return Err(e),
                };
                base.with_alpha(a, b, alpha)?.step(&x)?
            }
        };
        x = next;
        let r = state.record(a, b, &x, stop)?;
        if state.diverged(r) {
            return Ok(state.finish(k, x, StopReason::Diverged));
        }
        if state.stop_holds(a, b, &x, stop)? {
            return Ok(state.finish(k, x, StopReason::Converged));
        }
    }
    Ok(state.finish(k_max, x, StopReason::MaxIterations))
}
