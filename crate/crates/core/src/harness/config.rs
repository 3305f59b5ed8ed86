//! Experiment configuration, versioned by `"schema": 1`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandit::{circle_arms, GlbInstance, InstanceSpec, StretchSource};
use crate::error::{Error, Result};
use crate::nef::schema::{parse_json, DistSpec};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

fn default_delta() -> f64 {
    0.05
}

fn default_replicates() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub n: usize,
    pub radius: f64,
}

/// Arms as explicit vectors or as `{"circle": {"n": 10, "radius": 1.0}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArmsSpec {
    Explicit(Vec<Vec<f64>>),
    Generated { circle: Circle },
}

impl ArmsSpec {
    pub fn vectors(&self) -> Vec<Vec<f64>> {
        match self {
            ArmsSpec::Explicit(v) => v.clone(),
            ArmsSpec::Generated { circle } => circle_arms(circle.n, circle.radius),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub distribution: DistSpec,
    pub arms: ArmsSpec,
    pub theta_star: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<f64>,
    /// `[c1, c2]`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_rates: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub stretch: StretchSource,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub horizon: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Grid for `verify` and `tails` when run from a config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parse and validate, including every instance assumption.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.horizon == 0 || self.replicates == 0 {
            return Err(Error::Config("horizon and replicates must be positive".into()));
        }
        if let Some(g) = self.grid {
            if !(g.lo <= g.hi) || g.n == 0 {
                return Err(Error::Config(format!("grid needs lo <= hi and n >= 1, got {g:?}")));
            }
        }
        self.instance::<f64>().map(|_| ())
    }

    pub fn instance<T: Scalar>(&self) -> Result<GlbInstance<T>> {
        let c = T::lit;
        let base = self.distribution.build::<T>().map_err(|e| Error::Config(format!("distribution: {e}")))?;
        let arms = self.arms.vectors().iter().map(|x| x.iter().map(|&v| c(v)).collect()).collect();
        let mut spec = InstanceSpec::new(arms, self.theta_star.iter().map(|&v| c(v)).collect(), base);
        spec.s0 = self.s0.map(c);
        spec.s1 = self.s1.map(c);
        spec.s2 = self.s2.map(c);
        spec.tail_rates = self.tail_rates.map(|[a, b]| (c(a), c(b)));
        spec.m = self.m.map(c);
        spec.lambda = self.lambda.map(c);
        spec.stretch = self.stretch;
        GlbInstance::new(spec)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    ExperimentConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema": 1, "distribution": {"kind": "bernoulli", "p": 0.5},
        "arms": [[1.0, 0.0], [0.0, 1.0]], "theta_star": [0.5, 0.0], "horizon": 10}"#;

    #[test]
    fn defaults_are_filled() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!((c.delta, c.replicates, c.seed), (0.05, 1, 0));
        assert_eq!(c.stretch, StretchSource::Exact);
    }

    #[test]
    fn round_trips() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        let again = ExperimentConfig::parse(&c.to_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_json(), again.to_json());
    }

    #[test]
    fn unknown_field_has_pointer() {
        let text = MINIMAL.replace("\"p\": 0.5", "\"p\": 0.5, \"q\": 1");
        match ExperimentConfig::parse(&text) {
            Err(Error::Parse { pointer, .. }) => assert_eq!(pointer, "/distribution"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn circle_arms_parse() {
        let text = MINIMAL.replace("[[1.0, 0.0], [0.0, 1.0]]", "{\"circle\": {\"n\": 4, \"radius\": 1.0}}");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.arms.vectors().len(), 4);
    }
}
