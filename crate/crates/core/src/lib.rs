//! Natural exponential families, self-concordance certificates, GLM estimation
//! and the optimistic generalized linear bandit.
//!
//! Numerics are generic over [`Scalar`] (`f32` or `f64`); the `*F64` aliases below
//! fix the common case.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandit;
pub mod check;
pub mod error;
pub mod glm;
pub mod harness;
pub mod linalg;
pub mod nef;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod scc;
pub mod tails;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type BaseDistributionF64 = nef::BaseDistribution<f64>;
pub type NefFamilyF64 = nef::NefFamily<f64>;
pub type GlbInstanceF64 = bandit::GlbInstance<f64>;
