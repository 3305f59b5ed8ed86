use serde::Serialize;

use crate::scalar::{lit, Scalar};

/// Additive slack for numerically verified inequalities.
pub const SLACK: f64 = 1e-10;

/// Outcome of checking `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check<T> {
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
}

impl<T: Scalar> Check<T> {
    pub fn le(lhs: T, rhs: T, slack: T) -> Self {
        Check {
            lhs,
            rhs,
            ok: lhs <= rhs + slack,
        }
    }

    /// `lhs <= rhs + 1e-10`
    pub fn le_default(lhs: T, rhs: T) -> Self {
        Self::le(lhs, rhs, lit(SLACK))
    }

    pub fn slack(&self) -> T {
        self.rhs - self.lhs
    }
}
