//! Generators for the benchmark linear systems: two 4x4 well-conditioned
//! matrices, the diagonal zigzag quadratic, three discretized Fredholm
//! integral equations of the first kind (shaw, heat, gravity) and a 2-D
//! reaction-diffusion problem on a uniform grid.

pub mod grid;

use std::collections::BTreeMap;

use crate::dense::{DenseMatrix, Vector};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// A named test instance of `Ax = b`.
///
/// When the generator defines `b = A x_star`, the stored right-hand side
/// is exactly that product (bit-identical to recomputing it with
/// [`DenseMatrix::matvec`]). The reaction-diffusion problem instead
/// derives `b` from the forcing term, so its `x_star` is the sampled PDE
/// solution rather than the algebraic solution of the system.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    pub name: String,
    pub a: DenseMatrix<T>,
    pub b: Vector<T>,
    pub x_star: Option<Vector<T>>,
    pub metadata: BTreeMap<String, String>,
}

impl<T: Real> Problem<T> {
    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

/// Where the collocation points sit relative to the quadrature cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collocation {
    /// `s_i = c + (i - 1/2) h` — matches the toolbox assemblies of the
    /// shaw and gravity problems.
    Midpoint,
    /// `s_i = c + i h` — used by the heat problem, whose causal kernel
    /// needs the diagonal shift to stay nonzero.
    RightEndpoint,
}

/// A first-kind Fredholm integral equation `∫ K(s, t) x(t) dt = f(s)`
/// with `t` in `[a, b]`, `s` in `[c, d]`, discretized on `n` points.
pub struct KernelProblemSpec<T> {
    pub kernel: Box<dyn Fn(T, T) -> T + Send + Sync>,
    pub solution: Box<dyn Fn(T) -> T + Send + Sync>,
    pub t_lo: T,
    pub t_hi: T,
    pub s_lo: T,
    pub s_hi: T,
    pub n: usize,
    pub collocation: Collocation,
}

impl<T: Real> KernelProblemSpec<T> {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("discretization needs n >= 2"));
        }
        if self.t_hi.is_nan()
            || self.s_hi.is_nan()
            || self.t_hi <= self.t_lo
            || self.s_hi <= self.s_lo
        {
            return Err(Error::param("integration bounds must be increasing"));
        }
        Ok(())
    }
}

/// Quadrature midpoints `t*_j = a + (j - 1/2) h` of `[a, b]` split into
/// `n` cells.
fn midpoints<T: Real>(lo: T, hi: T, n: usize) -> (T, Vec<T>) {
    let h = (hi - lo) / real::<T>(n as f64);
    let half = real::<T>(0.5);
    let nodes = (0..n)
        .map(|j| lo + (real::<T>(j as f64) + half) * h)
        .collect();
    (h, nodes)
}

/// Assembles the collocation matrix `a_ij = h K(s_i, t*_j)` of a kernel
/// spec; shared by the generic discretization and the named problems.
fn fredholm_matrix<T: Real>(spec: &KernelProblemSpec<T>) -> Result<(DenseMatrix<T>, Vec<T>)> {
    spec.validate()?;
    let n = spec.n;
    let (h, t_nodes) = midpoints(spec.t_lo, spec.t_hi, n);
    let hs = (spec.s_hi - spec.s_lo) / real::<T>(n as f64);
    let half = real::<T>(0.5);
    let s_nodes: Vec<T> = (0..n)
        .map(|i| match spec.collocation {
            Collocation::Midpoint => spec.s_lo + (real::<T>(i as f64) + half) * hs,
            Collocation::RightEndpoint => spec.s_lo + real::<T>((i + 1) as f64) * hs,
        })
        .collect();

    let mut data = Vec::with_capacity(n * n);
    for &s in &s_nodes {
        for &t in &t_nodes {
            let v = h * (spec.kernel)(s, t);
            if !v.is_finite() {
                return Err(Error::KernelSingularity {
                    s: s.to_f64().unwrap_or(f64::NAN),
                    t: t.to_f64().unwrap_or(f64::NAN),
                });
            }
            data.push(v);
        }
    }
    Ok((DenseMatrix::new(n, n, data)?, t_nodes))
}

/// Midpoint quadrature-collocation discretization of a Fredholm spec:
/// `a_ij = h K(s_i, t*_j)`, `x*_j = x*(t*_j)`, `b = A x*`.
pub fn discretize_fredholm<T: Real>(spec: &KernelProblemSpec<T>) -> Result<Problem<T>> {
    let (a, t_nodes) = fredholm_matrix(spec)?;
    let x_star = Vector::from_fn(spec.n, |j| (spec.solution)(t_nodes[j]));
    let b = a.matvec(&x_star)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("n".into(), spec.n.to_string());
    Ok(Problem {
        name: "fredholm".into(),
        a,
        b,
        x_star: Some(x_star),
        metadata,
    })
}

/// One-dimensional image restoration test problem on `[-pi/2, pi/2]`.
///
/// Kernel `K(s, t) = (cos s + cos t)² (sin psi / psi)²` with
/// `psi = pi (sin s + sin t)` and the two-Gaussian solution
/// `2 exp(-6 (t - 0.8)²) + exp(-2 (t + 0.5)²)`. Severely ill-conditioned;
/// numerical rank 20 at n = 1000.
pub fn shaw<T: Real>(n: usize) -> Result<Problem<T>> {
    let half_pi = real::<T>(std::f64::consts::FRAC_PI_2);
    let spec = KernelProblemSpec {
        kernel: Box::new(shaw_kernel::<T>),
        solution: Box::new(shaw_solution::<T>),
        t_lo: -half_pi,
        t_hi: half_pi,
        s_lo: -half_pi,
        s_hi: half_pi,
        n,
        collocation: Collocation::Midpoint,
    };
    let mut p = discretize_fredholm(&spec)?;
    p.name = "shaw".into();
    for (k, v) in [
        ("a1", "2"),
        ("c1", "6"),
        ("t1", "0.8"),
        ("a2", "1"),
        ("c2", "2"),
        ("t2", "-0.5"),
    ] {
        p.metadata.insert(k.into(), v.into());
    }
    Ok(p)
}

/// Shaw kernel; `sin(psi)/psi` is taken as 1 below `|psi| = 1e-14`.
pub fn shaw_kernel<T: Real>(s: T, t: T) -> T {
    let pi = real::<T>(std::f64::consts::PI);
    let psi = pi * (s.sin() + t.sin());
    let sinc = if psi.abs() < real::<T>(1e-14) {
        T::one()
    } else {
        psi.sin() / psi
    };
    let c = s.cos() + t.cos();
    c * c * sinc * sinc
}

/// Two-Gaussian exact solution of the shaw problem.
pub fn shaw_solution<T: Real>(t: T) -> T {
    let (a1, c1, t1) = (real::<T>(2.0), real::<T>(6.0), real::<T>(0.8));
    let (a2, c2, t2) = (real::<T>(1.0), real::<T>(2.0), real::<T>(-0.5));
    a1 * (-c1 * (t - t1) * (t - t1)).exp() + a2 * (-c2 * (t - t2) * (t - t2)).exp()
}

/// Inverse heat equation on `[0, 1]` as a Volterra convolution.
///
/// Kernel `k(tau) = tau^{-3/2} / (2 kappa sqrt(pi)) exp(-1 / (4 kappa² tau))`
/// for `tau > 0` and zero otherwise, so the matrix is lower triangular with
/// a nonzero diagonal (collocation at right endpoints, quadrature at
/// midpoints). `kappa = 1` is the worst-conditioned case. The exact
/// solution is sampled at the endpoints `t_i = i h`, matching the
/// reference assembly of this problem.
pub fn heat<T: Real>(n: usize, kappa: T) -> Result<Problem<T>> {
    if kappa.is_nan() || kappa <= T::zero() {
        return Err(Error::param("heat problem needs kappa > 0"));
    }
    let spec = KernelProblemSpec {
        kernel: Box::new(move |s, t| heat_kernel(s - t, kappa)),
        solution: Box::new(heat_solution::<T>),
        t_lo: T::zero(),
        t_hi: T::one(),
        s_lo: T::zero(),
        s_hi: T::one(),
        n,
        collocation: Collocation::RightEndpoint,
    };
    let (a, _) = fredholm_matrix(&spec)?;
    let h = T::one() / real::<T>(n as f64);
    let x_star = Vector::from_fn(n, |j| heat_solution(real::<T>((j + 1) as f64) * h));
    let b = a.matvec(&x_star)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("n".into(), n.to_string());
    metadata.insert("kappa".into(), format!("{kappa}"));
    Ok(Problem {
        name: "heat".into(),
        a,
        b,
        x_star: Some(x_star),
        metadata,
    })
}

/// Causal heat kernel; zero for non-positive lag.
pub fn heat_kernel<T: Real>(tau: T, kappa: T) -> T {
    if tau <= T::zero() {
        return T::zero();
    }
    let sqrt_pi = real::<T>(std::f64::consts::PI).sqrt();
    let c = T::one() / (real::<T>(2.0) * kappa * sqrt_pi);
    let four = real::<T>(4.0);
    c * tau.powf(real::<T>(-1.5)) * (-T::one() / (four * kappa * kappa * tau)).exp()
}

/// Piecewise exact solution of the heat problem.
pub fn heat_solution<T: Real>(t: T) -> T {
    let t20 = real::<T>(20.0) * t;
    if t <= real::<T>(0.1) {
        real::<T>(75.0) * t * t
    } else if t <= real::<T>(0.15) {
        real::<T>(0.75) + (t20 - real::<T>(2.0)) * (real::<T>(3.0) - t20)
    } else if t <= real::<T>(0.5) {
        real::<T>(0.75) * (real::<T>(2.0) * (real::<T>(3.0) - t20)).exp()
    } else {
        T::zero()
    }
}

/// Gravity surveying problem on `[0, 1]`: kernel
/// `K(s, t) = (1 + (s - t)²)^{-3/2}` (symmetric Toeplitz matrix) and
/// solution `sin(pi t) + sin(2 pi t) / 2`. Numerical rank 15 at n = 1000.
pub fn gravity<T: Real>(n: usize) -> Result<Problem<T>> {
    let spec = KernelProblemSpec {
        kernel: Box::new(gravity_kernel::<T>),
        solution: Box::new(gravity_solution::<T>),
        t_lo: T::zero(),
        t_hi: T::one(),
        s_lo: T::zero(),
        s_hi: T::one(),
        n,
        collocation: Collocation::Midpoint,
    };
    let mut p = discretize_fredholm(&spec)?;
    p.name = "gravity".into();
    Ok(p)
}

pub fn gravity_kernel<T: Real>(s: T, t: T) -> T {
    let d = s - t;
    (T::one() + d * d).powf(real::<T>(-1.5))
}

pub fn gravity_solution<T: Real>(t: T) -> T {
    let pi = real::<T>(std::f64::consts::PI);
    (pi * t).sin() + real::<T>(0.5) * (real::<T>(2.0) * pi * t).sin()
}

fn integer_problem<T: Real>(name: &str, rows: &[[i32; 4]; 4]) -> Problem<T> {
    let a = DenseMatrix::from_fn(4, 4, |i, j| real::<T>(rows[i][j] as f64));
    let x_star = Vector::ones(4);
    let b = a.matvec(&x_star).expect("4x4 by construction");
    let mut metadata = BTreeMap::new();
    metadata.insert("n".into(), "4".into());
    Problem {
        name: name.into(),
        a,
        b,
        x_star: Some(x_star),
        metadata,
    }
}

/// First 4x4 well-conditioned test matrix (nonsymmetric, not positive
/// definite), `x* = (1, 1, 1, 1)`, `b = A x*`.
pub fn matrix_a1<T: Real>() -> Problem<T> {
    integer_problem(
        "a1",
        &[[1, 2, 3, 4], [4, 5, 6, 7], [4, 3, 2, 0], [0, 2, 3, 4]],
    )
}

/// Second 4x4 well-conditioned test matrix.
pub fn matrix_a2<T: Real>() -> Problem<T> {
    integer_problem(
        "a2",
        &[[2, 4, -4, 1], [2, 2, 2, 0], [2, 2, 1, 0], [2, 0, 0, 2]],
    )
}

/// Diagonal zigzag quadratic `min <A x, x>` with `A = diag(1, a)`,
/// `b = 0`, minimizer at the origin; condition number `max(a, 1/a)`.
pub fn beck_quadratic<T: Real>(a_param: T) -> Result<Problem<T>> {
    if a_param.is_nan() || a_param <= T::zero() {
        return Err(Error::param("beck quadratic needs a > 0"));
    }
    let a = DenseMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            T::zero()
        } else if i == 0 {
            T::one()
        } else {
            a_param
        }
    });
    let x_star = Vector::zeros(2);
    let b = a.matvec(&x_star).expect("2x2 by construction");
    let cond = a_param.max(T::one() / a_param);
    let mut metadata = BTreeMap::new();
    metadata.insert("a".into(), format!("{a_param}"));
    metadata.insert("cond".into(), format!("{cond}"));
    metadata.insert("n".into(), "2".into());
    Ok(Problem {
        name: "beck".into(),
        a,
        b,
        x_star: Some(x_star),
        metadata,
    })
}

/// Dense assembly of the reaction-diffusion grid problem
/// `-Δu + kappa² u = f` on `[-1, 1]²` with zero Dirichlet data: five-point
/// Laplacian over interior nodes plus a lumped reaction term,
/// `A = FivePoint / cell² + kappa² I`. The right-hand side samples the
/// forcing derived from the manufactured solution, so `b != A x_star` by
/// the discretization error.
///
/// Interior unknowns number `(2^level - 1)²`; level 7 is ~16k unknowns and
/// about 2 GiB dense, so large levels should use the banded path in
/// [`grid`] instead.
pub fn reaction_diffusion_2d<T: Real>(level: u32, kappa: T) -> Result<Problem<T>> {
    let g = grid::ReactionDiffusionGrid::new(level, kappa)?;
    let n = g.n();
    let per_side = g.interior_per_side();
    let cell = g.cell();
    let inv_h2 = T::one() / (cell * cell);
    let a = DenseMatrix::from_fn(n, n, |r, c| {
        let (rx, ry) = (r % per_side, r / per_side);
        let (cx, cy) = (c % per_side, c / per_side);
        if r == c {
            real::<T>(4.0) * inv_h2 + kappa * kappa
        } else if (ry == cy && rx.abs_diff(cx) == 1) || (rx == cx && ry.abs_diff(cy) == 1) {
            -inv_h2
        } else {
            T::zero()
        }
    });
    let b = g.forcing_vector();
    let x_star = g.exact_solution_vector();
    let mut metadata = BTreeMap::new();
    metadata.insert("level".into(), level.to_string());
    metadata.insert("cell".into(), format!("{cell}"));
    metadata.insert("h".into(), format!("{}", g.longest_edge()));
    metadata.insert("kappa".into(), format!("{kappa}"));
    metadata.insert("n".into(), n.to_string());
    Ok(Problem {
        name: "reaction-diffusion".into(),
        a,
        b,
        x_star: Some(x_star),
        metadata,
    })
}
