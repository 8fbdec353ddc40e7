//! Experiment configuration files.

use crate::algorithms::AlgorithmKind;
use crate::error::{Error, Result};
use crate::instances::{InstanceDescriptor, InstanceKind};
use crate::simulator::AlgorithmSpec;
use crate::types::ProblemParams;
use crate::verify::SuiteOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A bare tag such as `"minibatch_acsa"` or `{"kind": ..., "eta": ...}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmField {
    Tag(AlgorithmKind),
    Spec(AlgorithmSpec),
}

impl AlgorithmField {
    pub fn spec(&self) -> AlgorithmSpec {
        match *self {
            AlgorithmField::Tag(k) => k.into(),
            AlgorithmField::Spec(s) => s,
        }
    }
}

/// Either an explicit list or a count `n`, meaning seeds `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Count(u64),
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Count(n) => (0..*n).collect(),
        }
    }

    /// Parses `--seeds` values: `"1,2,3"` is a list, `"5"` a count.
    pub fn parse(s: &str) -> Result<Seeds> {
        let bad = |_| Error::Config(format!("cannot parse seeds {s:?}"));
        if s.contains(',') {
            let v = s
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(bad))
                .collect::<Result<Vec<_>>>()?;
            Ok(Seeds::List(v))
        } else {
            Ok(Seeds::Count(s.trim().parse::<u64>().map_err(bad)?))
        }
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::Count(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

pub const SWEEPABLE: [&str; 6] = ["H", "B", "sigma", "M", "K", "R"];

impl Sweep {
    fn validate(&self) -> Result<()> {
        if !SWEEPABLE.contains(&self.param.as_str()) {
            return Err(Error::Config(format!(
                "unknown sweep parameter {:?}; expected one of {SWEEPABLE:?}",
                self.param
            )));
        }
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        let integral = matches!(self.param.as_str(), "M" | "K" | "R");
        for v in &self.values {
            if integral && (v.fract() != 0.0 || *v < 1.0) {
                return Err(Error::Config(format!(
                    "{} values must be positive integers, got {v}",
                    self.param
                )));
            }
        }
        Ok(())
    }

    /// `pp` with the swept parameter set to `value`.
    pub fn apply(&self, pp: &ProblemParams, value: f64) -> Result<ProblemParams> {
        let mut q = *pp;
        match self.param.as_str() {
            "H" => q.smoothness = value,
            "B" => q.radius = value,
            "sigma" => q.sigma = value,
            "M" => q.machines = value as usize,
            "K" => q.local_steps = value as usize,
            "R" => q.rounds = value as usize,
            other => return Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
        }
        q.validate()?;
        Ok(q)
    }
}

fn default_instance() -> InstanceDescriptor {
    InstanceDescriptor::of_kind(InstanceKind::Chain)
}

fn default_algorithm() -> AlgorithmField {
    AlgorithmField::Tag(AlgorithmKind::MinibatchAcsa)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_instance")]
    pub instance: InstanceDescriptor,
    #[serde(default = "default_algorithm")]
    pub algorithm: AlgorithmField,
    pub params: ProblemParams,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Sample sizes and thresholds for `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<SuiteOptions>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::Config(format!("params: {e}")))?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if self.seeds.expand().is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        Ok(())
    }

    /// Problem parameters of every grid point: one entry without a sweep.
    pub fn grid(&self) -> Result<Vec<ProblemParams>> {
        match &self.sweep {
            None => Ok(vec![self.params]),
            Some(s) => s.values.iter().map(|v| s.apply(&self.params, *v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"params": {"H": 1, "B": 1, "sigma": 1, "M": 2, "K": 4, "R": 3}}"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.instance.kind, InstanceKind::Chain);
        assert_eq!(cfg.algorithm.spec().kind, AlgorithmKind::MinibatchAcsa);
        assert_eq!(cfg.seeds.expand(), vec![0]);
        assert_eq!(cfg.grid().unwrap().len(), 1);
    }

    #[test]
    fn algorithm_forms() {
        let a: AlgorithmField = serde_json::from_str(r#""local_sgd""#).unwrap();
        assert_eq!(a.spec().kind, AlgorithmKind::LocalSgd);
        let b: AlgorithmField =
            serde_json::from_str(r#"{"kind": "minibatch_sgd", "eta": 0.1}"#).unwrap();
        assert_eq!(b.spec().eta, Some(0.1));
    }

    #[test]
    fn seeds_forms() {
        assert_eq!(Seeds::parse("1,2,3").unwrap().expand(), vec![1, 2, 3]);
        assert_eq!(Seeds::parse("3").unwrap().expand(), vec![0, 1, 2]);
        assert!(Seeds::parse("x").is_err());
    }

    #[test]
    fn sweep_validation() {
        let text = r#"{"params": {"H": 1, "B": 1, "sigma": 1, "M": 2, "K": 4, "R": 3},
                      "sweep": {"param": "K", "values": [2, 8]}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid[1].local_steps, 8);
        let bad = text.replace("\"K\", \"values\"", "\"Q\", \"values\"");
        assert!(matches!(
            ExperimentConfig::from_json(&bad),
            Err(Error::Config(_))
        ));
        let frac = text.replace("[2, 8]", "[2.5]");
        assert!(ExperimentConfig::from_json(&frac).is_err());
    }

    #[test]
    fn malformed_is_config_error() {
        assert!(matches!(
            ExperimentConfig::from_json("{"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"params": {}, "extra": 1}"#),
            Err(Error::Config(_))
        ));
    }
}
