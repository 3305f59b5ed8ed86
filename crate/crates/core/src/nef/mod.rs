//! Natural exponential families: base measures, tilting, MGF/CGF and moment oracles.
//!
//! A [`BaseDistribution`] is a built-in [`Kind`] `Y` seen through an affine map
//! `X = sign * Y + shift` and then exponentially tilted by `tilt`. Tilting by `u`
//! again lands on `Y` tilted by `sign * (u + tilt)`, so every operation is a
//! closed-form or single-integral computation on the underlying kind.

mod kind;
mod law;
pub(crate) mod schema;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

pub use kind::{Kind, Method};
pub use law::{Central, Continuous, Law, Shape};
pub use schema::DistSpec;

/// Relative distance from a finite domain boundary inside which parameters are rejected.
pub const BOUNDARY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BaseDistribution<T> {
    kind: Kind<T>,
    sign: T,
    shift: T,
    tilt: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub u: T,
    pub mean: T,
    pub variance: T,
    pub third_central: T,
    pub third_absolute: T,
    pub method: Method,
    pub abs_error_estimate: T,
}

impl<T: Scalar> BaseDistribution<T> {
    pub fn new(kind: Kind<T>) -> Result<Self> {
        Ok(BaseDistribution {
            kind: kind.validate()?,
            sign: T::one(),
            shift: T::zero(),
            tilt: T::zero(),
        })
    }

    pub fn bernoulli(p: T) -> Result<Self> {
        Self::new(Kind::Bernoulli { p })
    }
    pub fn gaussian(sigma: T) -> Result<Self> {
        Self::new(Kind::Gaussian { sigma })
    }
    pub fn exponential(rate: T) -> Result<Self> {
        Self::new(Kind::Exponential { rate })
    }
    pub fn poisson(nu: T) -> Result<Self> {
        Self::new(Kind::Poisson { nu })
    }
    pub fn laplace(scale: T) -> Result<Self> {
        Self::new(Kind::Laplace { scale })
    }
    pub fn gamma(shape: T, scale: T) -> Result<Self> {
        Self::new(Kind::Gamma { shape, scale })
    }
    pub fn atoms(atoms: Vec<(T, T)>) -> Result<Self> {
        Self::new(Kind::Atoms { atoms })
    }
    pub fn dirac(at: T) -> Result<Self> {
        Self::atoms(vec![(at, T::one())])
    }

    pub fn kind(&self) -> &Kind<T> {
        &self.kind
    }

    /// Law of `X + c`.
    pub fn shifted(&self, c: T) -> Self {
        // tilting commutes with shifts, so only the affine part moves
        BaseDistribution {
            shift: self.shift + c,
            ..self.clone()
        }
    }

    /// Law of `-X`.
    pub fn reflected(&self) -> Self {
        BaseDistribution {
            kind: self.kind.clone(),
            sign: -self.sign,
            shift: -self.shift,
            tilt: -self.tilt,
        }
    }

    /// `Q_s` as a new base.
    pub fn tilted(&self, s: T) -> Result<Self> {
        self.check(s)?;
        Ok(BaseDistribution {
            tilt: self.tilt + s,
            ..self.clone()
        })
    }

    /// The base shifted to have mean zero.
    pub fn centered(&self) -> Result<Self> {
        let (m, _) = self.mean_var(T::zero())?;
        Ok(self.shifted(-m))
    }

    fn nat(&self, u: T) -> T {
        self.sign * (u + self.tilt)
    }

    /// Open interval `U_Q` of tilts with finite MGF.
    pub fn domain(&self) -> (T, T) {
        let (lo, hi) = self.kind.domain();
        if self.sign > T::zero() {
            (lo - self.tilt, hi - self.tilt)
        } else {
            (-hi - self.tilt, -lo - self.tilt)
        }
    }

    /// True when `u` is inside the domain and clear of the boundary guard.
    pub fn contains(&self, u: T) -> bool {
        self.check(u).is_ok()
    }

    pub fn check(&self, u: T) -> Result<()> {
        if !u.is_finite() {
            return Err(Error::invalid(format!("tilt parameter must be finite, got {u}")));
        }
        let (lo, hi) = self.domain();
        let width = if lo.is_finite() && hi.is_finite() { hi - lo } else { T::one() };
        let guard = lit::<T>(BOUNDARY_GUARD) * width;
        if u <= lo + guard || u >= hi - guard {
            return Err(Error::domain(
                "tilt parameter",
                u.to_f64_lossy(),
                lo.to_f64_lossy(),
                hi.to_f64_lossy(),
            ));
        }
        Ok(())
    }

    /// `E[e^{uX}]`; `+inf` outside the domain.
    pub fn mgf(&self, u: T) -> Result<T> {
        if !u.is_finite() {
            return Err(Error::invalid(format!("tilt parameter must be finite, got {u}")));
        }
        let (lo, hi) = self.domain();
        if u <= lo || u >= hi {
            return Ok(T::infinity());
        }
        Ok(self.cgf_unchecked(u).exp())
    }

    fn cgf_unchecked(&self, u: T) -> T {
        if u == T::zero() {
            return T::zero();
        }
        u * self.shift + self.kind.cgf(self.nat(u)) - self.kind.cgf(self.nat(T::zero()))
    }

    pub fn cgf(&self, u: T) -> Result<T> {
        self.check(u)?;
        Ok(self.cgf_unchecked(u))
    }

    /// `(mu(u), mu'(u))` by the cheapest exact route.
    pub fn mean_var(&self, u: T) -> Result<(T, T)> {
        self.check(u)?;
        let (m, v) = self.kind.mean_var(self.nat(u));
        Ok((self.shift + self.sign * m, v))
    }

    pub fn mean(&self, u: T) -> Result<T> {
        Ok(self.mean_var(u)?.0)
    }

    /// Law of `Q_u`.
    pub fn law(&self, u: T) -> Result<Law<T>> {
        self.check(u)?;
        Ok(self.kind.law(self.nat(u)).affine(self.sign, self.shift))
    }

    pub fn moments(&self, u: T) -> Result<MomentReport<T>> {
        self.check(u)?;
        let (c, method) = self.kind.central(self.nat(u))?;
        if !(c.variance.is_finite() && c.third.is_finite()) {
            return Err(Error::Numeric {
                msg: format!("moments at u = {u} are not finite"),
                residual: c.error.to_f64_lossy(),
            });
        }
        Ok(MomentReport {
            u,
            mean: self.shift + self.sign * c.mean,
            variance: c.variance.max(T::zero()),
            third_central: self.sign * c.third,
            third_absolute: c.third_abs.max(c.third.abs()),
            method,
            abs_error_estimate: c.error,
        })
    }

    /// `|mu''(u)| / mu'(u)`, zero for a degenerate law.
    pub fn gamma_ratio(&self, u: T) -> Result<T> {
        let m = self.moments(u)?;
        Ok(if m.variance == T::zero() {
            T::zero()
        } else {
            m.third_central.abs() / m.variance
        })
    }

    /// True when the base is a point mass.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            Kind::Bernoulli { p } => *p == T::zero() || *p == T::one(),
            Kind::Atoms { atoms } => atoms.iter().filter(|a| a.1 > T::zero()).count() <= 1,
            _ => false,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, u: T, rng: &mut R) -> Result<T> {
        self.check(u)?;
        Ok(self.shift + self.sign * self.kind.sample(self.nat(u), rng))
    }
}

/// A base together with an admissible tilt range `[S2, S1]` inside its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct NefFamily<T> {
    pub base: BaseDistribution<T>,
    pub param_lo: T,
    pub param_hi: T,
}

impl<T: Scalar> NefFamily<T> {
    pub fn new(base: BaseDistribution<T>, param_lo: T, param_hi: T) -> Result<Self> {
        if !(param_lo <= param_hi) {
            return Err(Error::invalid(format!(
                "parameter range [{param_lo}, {param_hi}] is empty"
            )));
        }
        base.check(param_lo)?;
        base.check(param_hi)?;
        Ok(NefFamily {
            base,
            param_lo,
            param_hi,
        })
    }

    /// Family with the degenerate range `[0, 0]`.
    pub fn at_origin(base: BaseDistribution<T>) -> Result<Self> {
        Self::new(base, T::zero(), T::zero())
    }

    pub fn cgf(&self, u: T) -> Result<T> {
        self.base.cgf(u)
    }
    pub fn mean_fn(&self, u: T) -> Result<T> {
        self.base.mean(u)
    }
    pub fn mean_var(&self, u: T) -> Result<(T, T)> {
        self.base.mean_var(u)
    }
    pub fn moments(&self, u: T) -> Result<MomentReport<T>> {
        self.base.moments(u)
    }
    pub fn gamma_ratio(&self, u: T) -> Result<T> {
        self.base.gamma_ratio(u)
    }
    pub fn sample_tilted<R: Rng + ?Sized>(&self, u: T, rng: &mut R) -> Result<T> {
        self.base.sample(u, rng)
    }

    /// `n` evenly spaced points covering `[S2, S1]`.
    pub fn grid(&self, n: usize) -> Vec<T> {
        linspace(self.param_lo, self.param_hi, n)
    }
}

pub fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / lit::<T>((n - 1) as f64);
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * lit::<T>(i as f64) })
                .collect()
        }
    }
}

pub fn mgf<T: Scalar>(base: &BaseDistribution<T>, u: T) -> Result<T> {
    base.mgf(u)
}

pub fn cgf<T: Scalar>(base: &BaseDistribution<T>, u: T) -> Result<T> {
    base.cgf(u)
}

pub fn mean_fn<T: Scalar>(family: &NefFamily<T>, u: T) -> Result<T> {
    family.mean_fn(u)
}

pub fn moments<T: Scalar>(family: &NefFamily<T>, u: T) -> Result<MomentReport<T>> {
    family.moments(u)
}

pub fn gamma_ratio<T: Scalar>(family: &NefFamily<T>, u: T) -> Result<T> {
    family.gamma_ratio(u)
}

pub fn sample_tilted<T: Scalar, R: Rng + ?Sized>(family: &NefFamily<T>, u: T, rng: &mut R) -> Result<T> {
    family.sample_tilted(u, rng)
}
