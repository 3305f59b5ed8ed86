//! The law of a tilted base, either as a finite atom list or a density.

use crate::error::Result;
use crate::quadrature::{integrate, integrate_tail, Direction, Estimate, Tolerance};
use crate::scalar::{lit, Scalar};

/// Density families reachable by tilting a built-in continuous base.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape<T> {
    Gaussian { mean: T, sd: T },
    Exponential { rate: T },
    /// Two-sided exponential with rate `right` on `[0, inf)` and `left` on `(-inf, 0)`.
    Laplace { right: T, left: T },
    Gamma { shape: T, rate: T, log_norm: T },
}

impl<T: Scalar> Shape<T> {
    pub fn gamma(shape: T, rate: T) -> Self {
        let lg = T::lit(libm::lgamma(shape.to_f64_lossy()));
        Shape::Gamma {
            shape,
            rate,
            log_norm: shape * rate.ln() - lg,
        }
    }

    pub fn pdf(&self, y: T) -> T {
        match *self {
            Shape::Gaussian { mean, sd } => {
                let z = (y - mean) / sd;
                (-lit::<T>(0.5) * z * z).exp() / (sd * T::TAU().sqrt())
            }
            Shape::Exponential { rate } => {
                if y < T::zero() {
                    T::zero()
                } else {
                    rate * (-rate * y).exp()
                }
            }
            Shape::Laplace { right, left } => {
                let k = right * left / (right + left);
                if y >= T::zero() {
                    k * (-right * y).exp()
                } else {
                    k * (left * y).exp()
                }
            }
            Shape::Gamma {
                shape,
                rate,
                log_norm,
            } => {
                if y <= T::zero() {
                    T::zero()
                } else {
                    (log_norm + (shape - T::one()) * y.ln() - rate * y).exp()
                }
            }
        }
    }

    fn support(&self) -> (T, T) {
        match self {
            Shape::Gaussian { .. } | Shape::Laplace { .. } => (T::neg_infinity(), T::infinity()),
            Shape::Exponential { .. } | Shape::Gamma { .. } => (T::zero(), T::infinity()),
        }
    }

    /// Mean and standard deviation, used only to place breakpoints and tail segments.
    fn location_scale(&self) -> (T, T) {
        match *self {
            Shape::Gaussian { mean, sd } => (mean, sd),
            Shape::Exponential { rate } => (rate.recip(), rate.recip()),
            Shape::Laplace { right, left } => {
                let (m, v) = laplace_mean_var(right, left);
                (m, v.sqrt())
            }
            Shape::Gamma { shape, rate, .. } => (shape / rate, shape.sqrt() / rate),
        }
    }
}

/// Mean and variance of the two-sided exponential mixture.
pub(crate) fn laplace_mean_var<T: Scalar>(right: T, left: T) -> (T, T) {
    let two = lit::<T>(2.0);
    let wr = left / (right + left);
    let wl = right / (right + left);
    let m = wr / right - wl / left;
    let m2 = wr * two / (right * right) + wl * two / (left * left);
    (m, m2 - m * m)
}

/// `X = sign * Y + shift` where `Y` has density `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Continuous<T> {
    pub shape: Shape<T>,
    pub sign: T,
    pub shift: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Law<T> {
    /// Atoms `(location, probability)` sorted by location.
    Discrete(Vec<(T, T)>),
    Continuous(Continuous<T>),
}

/// Central moments with the accumulated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Central<T> {
    pub mass: T,
    pub mean: T,
    pub variance: T,
    pub third: T,
    pub third_abs: T,
    pub error: T,
}

impl<T: Scalar> Continuous<T> {
    fn to_y(&self, x: T) -> T {
        (x - self.shift) * self.sign
    }

    /// Integrate `h` over `[lo, hi]` in the `Y` coordinate, intersected with the support.
    fn integrate_y<F: Fn(T) -> T>(&self, h: &F, lo: T, hi: T, breaks: &[T]) -> Result<Estimate<T>> {
        let tol = Tolerance::default();
        let (s_lo, s_hi) = self.shape.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        let zero = Estimate {
            value: T::zero(),
            error: T::zero(),
            evals: 0,
        };
        if !(lo < hi) {
            return Ok(zero);
        }
        let (center, scale) = self.shape.location_scale();
        let mut pts: Vec<T> = Vec::with_capacity(breaks.len() + 4);
        if lo.is_finite() {
            pts.push(lo);
        }
        if hi.is_finite() {
            pts.push(hi);
        }
        let mut interior = vec![center];
        if let Shape::Laplace { .. } = self.shape {
            interior.push(T::zero());
        }
        interior.extend_from_slice(breaks);
        pts.extend(interior.into_iter().filter(|&b| b > lo && b < hi));
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup();
        if pts.is_empty() {
            pts.push(center);
        }
        let mut acc = zero;
        let mut add = |e: Estimate<T>| {
            acc.value += e.value;
            acc.error += e.error;
            acc.evals += e.evals;
        };
        if !lo.is_finite() {
            add(integrate_tail(h, pts[0], Direction::Down, scale, tol)?);
        }
        for w in pts.windows(2) {
            add(integrate(h, w[0], w[1], tol)?);
        }
        if !hi.is_finite() {
            add(integrate_tail(h, pts[pts.len() - 1], Direction::Up, scale, tol)?);
        }
        Ok(acc)
    }

    /// `E[g(X)]`, splitting the range additionally at the `X`-coordinates in `breaks`.
    pub fn expect<G: Fn(T) -> T>(&self, g: G, breaks: &[T]) -> Result<Estimate<T>> {
        let yb: Vec<T> = breaks.iter().map(|&x| self.to_y(x)).collect();
        let h = |y: T| {
            let p = self.shape.pdf(y);
            if p == T::zero() {
                T::zero()
            } else {
                g(self.sign * y + self.shift) * p
            }
        };
        self.integrate_y(&h, T::neg_infinity(), T::infinity(), &yb)
    }

    /// `P(lo <= X <= hi)`; infinite limits allowed.
    pub fn mass(&self, lo: T, hi: T) -> Result<Estimate<T>> {
        if !(lo < hi) {
            return Ok(Estimate {
                value: T::zero(),
                error: T::zero(),
                evals: 0,
            });
        }
        let (a, b) = if self.sign > T::zero() {
            (self.to_y(lo), self.to_y(hi))
        } else {
            (self.to_y(hi), self.to_y(lo))
        };
        let pdf = |y: T| self.shape.pdf(y);
        self.integrate_y(&pdf, a, b, &[])
    }
}

impl<T: Scalar> Law<T> {
    pub(crate) fn discrete(mut atoms: Vec<(T, T)>) -> Self {
        atoms.retain(|a| a.1 > T::zero());
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atom locations"));
        Law::Discrete(atoms)
    }

    /// Law of `sign * X + shift`.
    pub(crate) fn affine(self, sign: T, shift: T) -> Self {
        match self {
            Law::Discrete(atoms) => {
                Law::discrete(atoms.into_iter().map(|(y, p)| (sign * y + shift, p)).collect())
            }
            Law::Continuous(c) => Law::Continuous(Continuous {
                shape: c.shape,
                sign: c.sign * sign,
                shift: sign * c.shift + shift,
            }),
        }
    }

    pub fn expect<G: Fn(T) -> T>(&self, g: G, breaks: &[T]) -> Result<Estimate<T>> {
        match self {
            Law::Discrete(atoms) => Ok(Estimate {
                value: atoms.iter().map(|&(y, p)| p * g(y)).sum(),
                error: T::zero(),
                evals: atoms.len(),
            }),
            Law::Continuous(c) => c.expect(g, breaks),
        }
    }

    /// `P(lo <= X <= hi)`.
    pub fn prob_within(&self, lo: T, hi: T) -> Result<T> {
        match self {
            Law::Discrete(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.0 >= lo && a.0 <= hi)
                .map(|a| a.1)
                .sum()),
            Law::Continuous(c) => Ok(c.mass(lo, hi)?.value),
        }
    }

    /// `P(X > x)`, or `P(X >= x)` when `inclusive`.
    pub fn prob_above(&self, x: T, inclusive: bool) -> Result<T> {
        match self {
            Law::Discrete(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.0 > x || (inclusive && a.0 == x))
                .map(|a| a.1)
                .sum()),
            Law::Continuous(c) => Ok(c.mass(x, T::infinity())?.value),
        }
    }

    /// `P(X < x)`, or `P(X <= x)` when `inclusive`.
    pub fn prob_below(&self, x: T, inclusive: bool) -> Result<T> {
        match self {
            Law::Discrete(atoms) => Ok(atoms
                .iter()
                .filter(|a| a.0 < x || (inclusive && a.0 == x))
                .map(|a| a.1)
                .sum()),
            Law::Continuous(c) => Ok(c.mass(T::neg_infinity(), x)?.value),
        }
    }

    pub fn central(&self) -> Result<Central<T>> {
        match self {
            Law::Discrete(atoms) => {
                let mass: T = atoms.iter().map(|a| a.1).sum();
                let mean = atoms.iter().map(|&(y, p)| p * y).sum::<T>() / mass;
                let mut c = Central {
                    mass,
                    mean,
                    variance: T::zero(),
                    third: T::zero(),
                    third_abs: T::zero(),
                    error: T::zero(),
                };
                for &(y, p) in atoms {
                    let d = y - mean;
                    let d2 = d * d;
                    c.variance += p * d2;
                    c.third += p * d2 * d;
                    c.third_abs += p * d2 * d.abs();
                }
                c.variance /= mass;
                c.third /= mass;
                c.third_abs /= mass;
                Ok(c)
            }
            Law::Continuous(law) => {
                let mass = law.expect(|_| T::one(), &[])?;
                let first = law.expect(|x| x, &[])?;
                let mean = first.value / mass.value;
                let m = [mean];
                let var = law.expect(|x| (x - mean).powi(2), &m)?;
                let below = law.expect(|x| if x < mean { (x - mean).powi(3) } else { T::zero() }, &m)?;
                let above = law.expect(|x| if x > mean { (x - mean).powi(3) } else { T::zero() }, &m)?;
                Ok(Central {
                    mass: mass.value,
                    mean,
                    variance: var.value,
                    third: below.value + above.value,
                    third_abs: above.value - below.value,
                    error: mass.error + first.error + var.error + below.error + above.error,
                })
            }
        }
    }
}
