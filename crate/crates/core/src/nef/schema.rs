//! JSON description of a base distribution.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BaseDistribution, Kind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `{"kind": "exponential", "rate": 1.0}`, `{"kind": "atoms", "atoms": [[0.0, 0.5], [1.0, 0.5]]}`, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Bernoulli { p: f64 },
    Gaussian { sigma: f64 },
    Exponential { rate: f64 },
    Poisson { nu: f64 },
    Laplace { scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Atoms { atoms: Vec<[f64; 2]> },
    Counterexample { i_max: u32 },
    Shifted { base: Box<DistSpec>, by: f64 },
    Reflected { base: Box<DistSpec> },
    Tilted { base: Box<DistSpec>, by: f64 },
    Centered { base: Box<DistSpec> },
}

impl DistSpec {
    pub fn build<T: Scalar>(&self) -> Result<BaseDistribution<T>> {
        let c = T::lit;
        let kind = match self {
            DistSpec::Bernoulli { p } => Kind::Bernoulli { p: c(*p) },
            DistSpec::Gaussian { sigma } => Kind::Gaussian { sigma: c(*sigma) },
            DistSpec::Exponential { rate } => Kind::Exponential { rate: c(*rate) },
            DistSpec::Poisson { nu } => Kind::Poisson { nu: c(*nu) },
            DistSpec::Laplace { scale } => Kind::Laplace { scale: c(*scale) },
            DistSpec::Gamma { shape, scale } => Kind::Gamma {
                shape: c(*shape),
                scale: c(*scale),
            },
            DistSpec::Atoms { atoms } => Kind::Atoms {
                atoms: atoms.iter().map(|a| (c(a[0]), c(a[1]))).collect(),
            },
            DistSpec::Counterexample { i_max } => Kind::Counterexample { i_max: *i_max },
            DistSpec::Shifted { base, by } => return Ok(base.build::<T>()?.shifted(c(*by))),
            DistSpec::Reflected { base } => return Ok(base.build::<T>()?.reflected()),
            DistSpec::Tilted { base, by } => return base.build::<T>()?.tilted(c(*by)),
            DistSpec::Centered { base } => return base.build::<T>()?.centered(),
        };
        BaseDistribution::new(kind)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    /// Accept either an inline JSON object or a path to a file holding one.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            Self::parse(arg)
        } else {
            let text = std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::io(arg, e))?;
            Self::parse(&text)
        }
    }
}

/// Deserialize with errors located by JSON pointer.
pub(crate) fn parse_json<D: serde::de::DeserializeOwned>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::from("/")
        } else {
            format!("/{}", path.replace('.', "/"))
        };
        Error::Parse {
            pointer,
            msg: e.into_inner().to_string(),
        }
    })
}
