//! Ridge-regularized maximum likelihood for a GLM built on a natural exponential family.
//!
//! Observations are consumed through [`Design`], which visits groups of rows that
//! share a covariate vector. A plain [`Dataset`] has one group per row; the bandit
//! keeps per-arm counts and response sums, which gives identical sums at O(arms) cost.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::nef::{BaseDistribution, NefFamily};
use crate::scalar::{lit, Scalar};

/// Gradient norm at which Newton iterations stop.
pub const GRAD_TOL: f64 = 1e-8;
/// Below this gap the difference quotient is replaced by the midpoint derivative.
pub const ALPHA_SWITCH: f64 = 1e-8;
const BACKTRACK: f64 = 0.5;
const ARMIJO: f64 = 1e-4;

/// Groups of rows `(x, count, sum of responses)`.
pub trait Design<T: Scalar> {
    fn dim(&self) -> usize;
    fn visit(&self, f: &mut dyn FnMut(usize, &[T], T, T) -> Result<()>) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    dim: usize,
    rows: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(dim: usize) -> Self {
        Dataset { dim, rows: Vec::new() }
    }

    pub fn rows(&self) -> &[(Vec<T>, T)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Append a row; `x` must lie in the closed unit ball.
    pub fn push(&mut self, x: Vec<T>, y: T) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!("row has dimension {}, expected {}", x.len(), self.dim)));
        }
        let n = norm(&x);
        if !(n <= T::one() + lit(1e-12)) || !y.is_finite() {
            return Err(Error::invalid(format!("row {} has |x| = {n} or non-finite y = {y}", self.rows.len())));
        }
        self.rows.push((x, y));
        Ok(())
    }

    /// Parse CSV rows `x1,...,xd,y`; blank lines and lines starting with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut out: Option<Dataset<T>> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let vals = match vals {
                Ok(v) if v.len() >= 2 => v,
                _ if out.is_none() => continue, // header
                _ => return Err(Error::Parse { pointer: format!("line {}", ln + 1), msg: "expected numeric fields x1,...,xd,y".into() }),
            };
            let d = vals.len() - 1;
            let ds = out.get_or_insert_with(|| Dataset::new(d));
            ds.push(vals[..d].iter().map(|&v| T::lit(v)).collect(), T::lit(vals[d]))
                .map_err(|e| Error::Parse { pointer: format!("line {}", ln + 1), msg: e.to_string() })?;
        }
        out.ok_or_else(|| Error::Parse { pointer: "line 1".into(), msg: "no data rows".into() })
    }
}

impl<T: Scalar> Design<T> for Dataset<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn visit(&self, f: &mut dyn FnMut(usize, &[T], T, T) -> Result<()>) -> Result<()> {
        for (i, (x, y)) in self.rows.iter().enumerate() {
            f(i, x, T::one(), *y)?;
        }
        Ok(())
    }
}

/// Per-arm pull counts and response sums over a fixed arm set.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmCounts<T> {
    arms: Vec<Vec<T>>,
    counts: Vec<T>,
    sums: Vec<T>,
}

impl<T: Scalar> ArmCounts<T> {
    pub fn new(arms: Vec<Vec<T>>) -> Self {
        let k = arms.len();
        ArmCounts {
            arms,
            counts: vec![T::zero(); k],
            sums: vec![T::zero(); k],
        }
    }

    pub fn record(&mut self, arm: usize, y: T) {
        self.counts[arm] += T::one();
        self.sums[arm] += y;
    }

    pub fn arms(&self) -> &[Vec<T>] {
        &self.arms
    }

    pub fn count(&self, arm: usize) -> T {
        self.counts[arm]
    }
}

impl<T: Scalar> Design<T> for ArmCounts<T> {
    fn dim(&self) -> usize {
        self.arms.first().map_or(0, |a| a.len())
    }
    fn visit(&self, f: &mut dyn FnMut(usize, &[T], T, T) -> Result<()>) -> Result<()> {
        for (i, x) in self.arms.iter().enumerate() {
            if self.counts[i] > T::zero() {
                f(i, x, self.counts[i], self.sums[i])?;
            }
        }
        Ok(())
    }
}

fn inner<T: Scalar>(base: &BaseDistribution<T>, i: usize, x: &[T], theta: &[T]) -> Result<T> {
    let u = dot(x, theta);
    base.check(u).map_err(|e| match e {
        Error::Domain { value, lo, hi, .. } => Error::domain(format!("inner product of row {i}"), value, lo, hi),
        other => other,
    })?;
    Ok(u)
}

/// `(lambda/2)|theta|^2 + sum_i psi(x_i^T theta) - y_i x_i^T theta`
pub fn loss<T: Scalar>(family: &NefFamily<T>, data: &impl Design<T>, lambda: T, theta: &[T]) -> Result<T> {
    let base = &family.base;
    let mut acc = lit::<T>(0.5) * lambda * dot(theta, theta);
    data.visit(&mut |i, x, n, sy| {
        let u = inner(base, i, x, theta)?;
        acc += n * base.cgf(u)? - sy * u;
        Ok(())
    })?;
    Ok(acc)
}

/// `g(theta) = sum_i mu(x_i^T theta) x_i + lambda theta`
pub fn gradient_map<T: Scalar>(family: &NefFamily<T>, data: &impl Design<T>, lambda: T, theta: &[T]) -> Result<Vec<T>> {
    let base = &family.base;
    let mut g: Vec<T> = theta.iter().map(|&t| lambda * t).collect();
    data.visit(&mut |i, x, n, _| {
        let w = n * base.mean(inner(base, i, x, theta)?)?;
        for (gj, &xj) in g.iter_mut().zip(x) {
            *gj += w * xj;
        }
        Ok(())
    })?;
    Ok(g)
}

/// `sum_i x_i y_i`
pub fn response_sum<T: Scalar>(data: &impl Design<T>) -> Vec<T> {
    let mut s = vec![T::zero(); data.dim()];
    let _ = data.visit(&mut |_, x, _, sy| {
        for (sj, &xj) in s.iter_mut().zip(x) {
            *sj += sy * xj;
        }
        Ok(())
    });
    s
}

/// Gradient of the loss, `g(theta) - sum_i x_i y_i`.
pub fn loss_gradient<T: Scalar>(family: &NefFamily<T>, data: &impl Design<T>, lambda: T, theta: &[T]) -> Result<Vec<T>> {
    let g = gradient_map(family, data, lambda, theta)?;
    Ok(g.iter().zip(response_sum(data)).map(|(&a, b)| a - b).collect())
}

/// `H(theta) = lambda I + sum_i mu'(x_i^T theta) x_i x_i^T`
pub fn hessian<T: Scalar>(family: &NefFamily<T>, data: &impl Design<T>, lambda: T, theta: &[T]) -> Result<Matrix<T>> {
    let base = &family.base;
    let mut h = Matrix::scaled_identity(data.dim(), lambda);
    data.visit(&mut |i, x, n, _| {
        let (_, v) = base.mean_var(inner(base, i, x, theta)?)?;
        h.add_outer(n * v, x);
        Ok(())
    })?;
    Ok(h)
}

/// `alpha(u, u') = int_0^1 mu'(u + v (u' - u)) dv`, as a difference quotient.
pub fn alpha<T: Scalar>(base: &BaseDistribution<T>, u: T, u2: T) -> Result<T> {
    if (u - u2).abs() > lit(ALPHA_SWITCH) {
        Ok((base.mean(u)? - base.mean(u2)?) / (u - u2))
    } else {
        Ok(base.mean_var(lit::<T>(0.5) * (u + u2))?.1)
    }
}

/// `G(theta1, theta2) = lambda I + sum_i alpha(x_i^T theta1, x_i^T theta2) x_i x_i^T`
pub fn difference_quotient_matrix<T: Scalar>(
    family: &NefFamily<T>,
    data: &impl Design<T>,
    lambda: T,
    theta1: &[T],
    theta2: &[T],
) -> Result<Matrix<T>> {
    let base = &family.base;
    let mut g = Matrix::scaled_identity(data.dim(), lambda);
    data.visit(&mut |i, x, n, _| {
        let a = alpha(base, inner(base, i, x, theta1)?, inner(base, i, x, theta2)?)?;
        g.add_outer(n * a, x);
        Ok(())
    })?;
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub theta_hat: Vec<T>,
    pub gradient_norm: T,
    pub newton_iters: usize,
    pub converged: bool,
}

fn feasible<T: Scalar>(base: &BaseDistribution<T>, data: &impl Design<T>, theta: &[T]) -> bool {
    data.visit(&mut |i, x, _, _| inner(base, i, x, theta).map(|_| ())).is_ok()
}

/// Damped Newton with Armijo backtracking that never leaves the MGF domain.
pub fn fit_mle<T: Scalar>(
    family: &NefFamily<T>,
    data: &impl Design<T>,
    lambda: T,
    init: &[T],
    max_iters: usize,
) -> Result<FitResult<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let base = &family.base;
    let mut theta = init.to_vec();
    let mut f = loss(family, data, lambda, &theta)?;
    let mut gn = T::infinity();
    for iter in 0..=max_iters {
        let g = loss_gradient(family, data, lambda, &theta)?;
        gn = norm(&g);
        if gn <= lit(GRAD_TOL) {
            return Ok(FitResult {
                theta_hat: theta,
                gradient_norm: gn,
                newton_iters: iter,
                converged: true,
            });
        }
        if iter == max_iters {
            break;
        }
        let step = hessian(family, data, lambda, &theta)?.cholesky()?.solve(&g);
        let decrement = dot(&g, &step);
        // Once the predicted decrease is below rounding in the loss, take the Newton step as is.
        let unresolved = decrement <= lit::<T>(1e4) * T::epsilon() * (T::one() + f.abs());
        let mut t = T::one();
        loop {
            let cand: Vec<T> = theta.iter().zip(&step).map(|(&a, &s)| a - t * s).collect();
            if feasible(base, data, &cand) {
                let fc = loss(family, data, lambda, &cand)?;
                if unresolved || fc <= f - lit::<T>(ARMIJO) * t * decrement {
                    theta = cand;
                    f = fc;
                    break;
                }
            }
            t *= lit(BACKTRACK);
            if t < lit(1e-30) {
                return Err(Error::Optimization {
                    msg: "no domain-feasible step with sufficient decrease".into(),
                    iters: iter,
                    grad_norm: gn.to_f64_lossy(),
                });
            }
        }
    }
    Ok(FitResult {
        theta_hat: theta,
        gradient_norm: gn,
        newton_iters: max_iters,
        converged: false,
    })
}
