//! Per-kind formulas in the kind's own natural parameter `v`.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal, Poisson};

use super::law::{laplace_mean_var, Central, Continuous, Law, Shape};
use crate::error::{Error, Result};
use crate::scalar::{lit, log_sum_exp, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Kind<T> {
    Bernoulli { p: T },
    Gaussian { sigma: T },
    Exponential { rate: T },
    Poisson { nu: T },
    Laplace { scale: T },
    Gamma { shape: T, scale: T },
    /// `(location, weight)` pairs; weights are normalized on construction.
    Atoms { atoms: Vec<(T, T)> },
    /// Atoms at `2^k`, `k = 1..=i_max`, with doubly exponentially decaying weights.
    Counterexample { i_max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Quadrature,
    Series,
}

pub(crate) const MAX_COUNTEREXAMPLE_INDEX: u32 = 60;

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Scalar> Kind<T> {
    pub(crate) fn validate(self) -> Result<Self> {
        match &self {
            Kind::Bernoulli { p } => {
                if !(*p >= T::zero() && *p <= T::one()) {
                    return Err(Error::invalid(format!("Bernoulli p must lie in [0, 1], got {p}")));
                }
            }
            Kind::Gaussian { sigma } => positive("sigma", *sigma)?,
            Kind::Exponential { rate } => positive("rate", *rate)?,
            Kind::Poisson { nu } => positive("nu", *nu)?,
            Kind::Laplace { scale } => positive("scale", *scale)?,
            Kind::Gamma { shape, scale } => {
                positive("shape", *shape)?;
                positive("scale", *scale)?;
            }
            Kind::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::invalid("atom list is empty"));
                }
                let mut total = T::zero();
                for (i, &(y, w)) in atoms.iter().enumerate() {
                    if !y.is_finite() || !w.is_finite() || w < T::zero() {
                        return Err(Error::invalid(format!("atom {i} = ({y}, {w}) is not a finite location with nonnegative weight")));
                    }
                    total += w;
                }
                let tol = lit::<T>(1e-12).max(T::epsilon() * lit(atoms.len() as f64 * 4.0));
                if (total - T::one()).abs() > tol {
                    return Err(Error::invalid(format!("atom weights sum to {total}, not 1")));
                }
                let atoms = atoms.iter().map(|&(y, w)| (y, w / total)).collect();
                return Ok(Kind::Atoms { atoms });
            }
            Kind::Counterexample { i_max } => {
                if *i_max < 2 || *i_max > MAX_COUNTEREXAMPLE_INDEX {
                    return Err(Error::invalid(format!(
                        "counterexample truncation index must lie in [2, {MAX_COUNTEREXAMPLE_INDEX}], got {i_max}"
                    )));
                }
            }
        }
        Ok(self)
    }

    /// Open interval of natural parameters with finite MGF.
    pub fn domain(&self) -> (T, T) {
        let inf = T::infinity();
        match *self {
            Kind::Exponential { rate } => (-inf, rate),
            Kind::Laplace { scale } => (-scale.recip(), scale.recip()),
            Kind::Gamma { scale, .. } => (-inf, scale.recip()),
            _ => (-inf, inf),
        }
    }

    /// Counterexample atoms as `(location, dyadic log-weight, small offset)`.
    ///
    /// The dyadic part is exact in binary floating point, so the largest tilted exponent
    /// can be removed without rounding before the `ln 4` offsets are added back.
    pub(crate) fn counterexample_terms(i_max: u32) -> Vec<(T, T, T)> {
        let ln4 = lit::<T>(4.0).ln();
        (1..=i_max)
            .map(|k| {
                let loc = lit::<T>(2.0).powi(k as i32);
                if k % 2 == 0 {
                    (loc, -lit::<T>(4.0).powi(k as i32), T::zero())
                } else {
                    (loc, -lit::<T>(3.0) * lit::<T>(4.0).powi(k as i32 - 1), -ln4)
                }
            })
            .collect()
    }

    /// Tilted counterexample weights `(location, probability)` and `ln` of the tilted normalizer.
    pub(crate) fn counterexample_tilt(i_max: u32, v: T) -> (Vec<(T, T)>, T) {
        let terms = Self::counterexample_terms(i_max);
        let m = terms.iter().fold(T::neg_infinity(), |a, t| a.max(t.1 + v * t.0));
        let raw: Vec<(T, T)> = terms.iter().map(|&(y, big, small)| (y, ((big + v * y) - m + small).exp())).collect();
        let z: T = raw.iter().map(|a| a.1).sum();
        (raw.into_iter().map(|(y, w)| (y, w / z)).collect(), m + z.ln())
    }

    pub fn cgf(&self, v: T) -> T {
        match self {
            Kind::Bernoulli { p } => {
                let p = *p;
                if p == T::zero() {
                    T::zero()
                } else if p == T::one() {
                    v
                } else if v <= T::zero() {
                    (p * v.exp_m1()).ln_1p()
                } else {
                    v + ((T::one() - p) * (-v).exp_m1()).ln_1p()
                }
            }
            Kind::Gaussian { sigma } => lit::<T>(0.5) * sigma.powi(2) * v * v,
            Kind::Exponential { rate } => -(-v / *rate).ln_1p(),
            Kind::Poisson { nu } => *nu * v.exp_m1(),
            Kind::Laplace { scale } => -(-(*scale * v).powi(2)).ln_1p(),
            Kind::Gamma { shape, scale } => -*shape * (-*scale * v).ln_1p(),
            Kind::Atoms { atoms } => log_sum_exp(atoms.iter().filter(|a| a.1 > T::zero()).map(|&(y, w)| w.ln() + v * y)),
            Kind::Counterexample { i_max } => {
                Self::counterexample_tilt(*i_max, v).1 - Self::counterexample_tilt(*i_max, T::zero()).1
            }
        }
    }

    /// Law of the tilted variable at natural parameter `v`.
    pub fn law(&self, v: T) -> Law<T> {
        let cont = |shape| {
            Law::Continuous(Continuous {
                shape,
                sign: T::one(),
                shift: T::zero(),
            })
        };
        match self {
            Kind::Bernoulli { p } => {
                let (m, _) = self.mean_var(v);
                if *p == T::zero() || *p == T::one() {
                    Law::discrete(vec![(m, T::one())])
                } else {
                    Law::discrete(vec![(T::zero(), T::one() - m), (T::one(), m)])
                }
            }
            Kind::Gaussian { sigma } => cont(Shape::Gaussian {
                mean: sigma.powi(2) * v,
                sd: *sigma,
            }),
            Kind::Exponential { rate } => cont(Shape::Exponential { rate: *rate - v }),
            Kind::Laplace { scale } => cont(Shape::Laplace {
                right: scale.recip() - v,
                left: scale.recip() + v,
            }),
            Kind::Gamma { shape, scale } => cont(Shape::gamma(*shape, scale.recip() - v)),
            Kind::Poisson { nu } => Law::discrete(poisson_atoms(*nu * v.exp())),
            Kind::Atoms { atoms } => Law::discrete(tilt_atoms(atoms.iter().map(|&(y, w)| (y, w.ln())), v)),
            Kind::Counterexample { i_max } => Law::discrete(Self::counterexample_tilt(*i_max, v).0),
        }
    }

    /// Mean and variance of the tilted law, by the fastest exact route.
    pub fn mean_var(&self, v: T) -> (T, T) {
        match self {
            Kind::Bernoulli { p } => {
                let p = *p;
                let m = if p == T::zero() || p == T::one() {
                    p
                } else {
                    sigmoid(v + p.ln() - (T::one() - p).ln())
                };
                (m, m * (T::one() - m))
            }
            Kind::Gaussian { sigma } => {
                let s2 = sigma.powi(2);
                (s2 * v, s2)
            }
            Kind::Exponential { rate } => {
                let r = *rate - v;
                (r.recip(), r.powi(-2))
            }
            Kind::Poisson { nu } => {
                let n = *nu * v.exp();
                (n, n)
            }
            Kind::Laplace { scale } => laplace_mean_var(scale.recip() - v, scale.recip() + v),
            Kind::Gamma { shape, scale } => {
                let r = scale.recip() - v;
                (*shape / r, *shape / (r * r))
            }
            Kind::Atoms { .. } | Kind::Counterexample { .. } => {
                let c = self.law(v).central().expect("finite atom sums");
                (c.mean, c.variance)
            }
        }
    }

    /// Central moments of the tilted law plus the method that produced them.
    pub fn central(&self, v: T) -> Result<(Central<T>, Method)> {
        let two = lit::<T>(2.0);
        let analytic = |mean: T, variance: T, third: T, third_abs: T| Central {
            mass: T::one(),
            mean,
            variance,
            third,
            third_abs,
            error: T::zero(),
        };
        Ok(match self {
            Kind::Bernoulli { .. } => {
                let (p, _) = self.mean_var(v);
                let q = T::one() - p;
                (analytic(p, p * q, p * q * (q - p), p * q * (p * p + q * q)), Method::Analytic)
            }
            Kind::Gaussian { sigma } => {
                let s = *sigma;
                let abs3 = two * (two / T::PI()).sqrt() * s.powi(3);
                (analytic(s * s * v, s * s, T::zero(), abs3), Method::Analytic)
            }
            Kind::Exponential { rate } => {
                let r = *rate - v;
                let abs3 = (lit::<T>(12.0) / T::E() - two) / r.powi(3);
                (analytic(r.recip(), r.powi(-2), two / r.powi(3), abs3), Method::Analytic)
            }
            Kind::Gamma { shape, scale } => {
                // Absolute third moment has no elementary form; take it from quadrature.
                let r = scale.recip() - v;
                let q = self.law(v).central()?;
                let mut c = analytic(*shape / r, *shape / (r * r), two * *shape / r.powi(3), q.third_abs);
                c.error = q.error;
                (c, Method::Analytic)
            }
            Kind::Poisson { nu } => {
                let n = *nu * v.exp();
                let s = self.law(v).central()?;
                let mut c = analytic(n, n, n, s.third_abs);
                c.error = (s.mass - T::one()).abs();
                (c, Method::Analytic)
            }
            Kind::Laplace { .. } => (self.law(v).central()?, Method::Quadrature),
            Kind::Atoms { .. } | Kind::Counterexample { .. } => (self.law(v).central()?, Method::Series),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, v: T, rng: &mut R) -> T {
        let f = |x: T| x.to_f64_lossy();
        let draw = match self {
            Kind::Bernoulli { .. } => {
                let (m, _) = self.mean_var(v);
                if rng.random::<f64>() < f(m) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Gaussian { sigma } => {
                let s = f(*sigma);
                Normal::new(s * s * f(v), s).expect("valid normal").sample(rng)
            }
            Kind::Exponential { rate } => Exp::new(f(*rate - v)).expect("valid rate").sample(rng),
            Kind::Poisson { nu } => {
                let n = f(*nu * v.exp());
                Poisson::new(n).expect("valid Poisson mean").sample(rng)
            }
            Kind::Laplace { scale } => {
                let a = f(scale.recip() - v);
                let b = f(scale.recip() + v);
                if rng.random::<f64>() < b / (a + b) {
                    Exp::new(a).expect("valid rate").sample(rng)
                } else {
                    -Exp::new(b).expect("valid rate").sample(rng)
                }
            }
            Kind::Gamma { shape, scale } => {
                let r = f(scale.recip() - v);
                Gamma::new(f(*shape), 1.0 / r).expect("valid gamma").sample(rng)
            }
            Kind::Atoms { .. } | Kind::Counterexample { .. } => {
                return match self.law(v) {
                    Law::Discrete(atoms) => sample_atoms(&atoms, rng),
                    Law::Continuous(_) => unreachable!("atom kinds have discrete laws"),
                };
            }
        };
        T::lit(draw)
    }
}

/// Normalized tilted atoms from `(location, log weight)` pairs, computed with the max exponent removed.
fn tilt_atoms<T: Scalar>(atoms: impl Iterator<Item = (T, T)>, v: T) -> Vec<(T, T)> {
    let expo: Vec<(T, T)> = atoms
        .filter(|a| a.1 > T::neg_infinity())
        .map(|(y, lw)| (y, lw + v * y))
        .collect();
    let m = expo.iter().fold(T::neg_infinity(), |a, b| a.max(b.1));
    let raw: Vec<(T, T)> = expo.iter().map(|&(y, e)| (y, (e - m).exp())).collect();
    let z: T = raw.iter().map(|a| a.1).sum();
    raw.into_iter().map(|(y, w)| (y, w / z)).collect()
}

/// Poisson probabilities, summed until the geometric tail bound drops below `1e-17`.
fn poisson_atoms<T: Scalar>(n: T) -> Vec<(T, T)> {
    let ln_n = n.ln();
    let mut lt = -n;
    let mut out = Vec::new();
    let tiny = lit::<T>(1e-17);
    let mut k = 0u64;
    loop {
        let kt = lit::<T>(k as f64);
        let p = lt.exp();
        if p > T::zero() {
            out.push((kt, p));
        }
        let ratio = n / (kt + T::one());
        if kt > n && ratio < T::one() && p * ratio / (T::one() - ratio) < tiny {
            break;
        }
        lt += ln_n - (kt + T::one()).ln();
        k += 1;
    }
    out
}

fn sample_atoms<T: Scalar, R: Rng + ?Sized>(atoms: &[(T, T)], rng: &mut R) -> T {
    let u = T::lit(rng.random::<f64>());
    let mut acc = T::zero();
    for &(y, p) in atoms {
        acc += p;
        if u < acc {
            return y;
        }
    }
    atoms.last().expect("nonempty atoms").0
}
