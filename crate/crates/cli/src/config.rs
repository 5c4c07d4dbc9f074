use std::fmt;
use std::path::PathBuf;

use anatomy_core::harness::Scale;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    #[serde(alias = "sum")]
    SieveSum,
    Conditions,
    Sample,
    ExactDist,
    EkCompare,
    PdCompare,
    Smooth,
    SmallPrime,
    PolyAsym,
    PolyTypical,
    Ewens,
    Dickman,
    Selftest,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::SieveSum => "sieve-sum",
            CommandKind::Conditions => "conditions",
            CommandKind::Sample => "sample",
            CommandKind::ExactDist => "exact-dist",
            CommandKind::EkCompare => "ek-compare",
            CommandKind::PdCompare => "pd-compare",
            CommandKind::Smooth => "smooth",
            CommandKind::SmallPrime => "small-prime",
            CommandKind::PolyAsym => "poly-asym",
            CommandKind::PolyTypical => "poly-typical",
            CommandKind::Ewens => "ewens",
            CommandKind::Dickman => "dickman",
            CommandKind::Selftest => "selftest",
        }
    }

    /// The comparison a command performs, if it compares against a limit.
    pub fn implied_target(self) -> Option<Target> {
        match self {
            CommandKind::EkCompare => Some(Target::Normal),
            CommandKind::PdCompare => Some(Target::Pd),
            CommandKind::PolyTypical => Some(Target::Gamma),
            CommandKind::Smooth => Some(Target::Dickman),
            CommandKind::SmallPrime => Some(Target::SmallPrime),
            CommandKind::Ewens => Some(Target::EwensSide),
            _ => None,
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Normal,
    Pd,
    Gamma,
    Dickman,
    SmallPrime,
    EwensSide,
}

/// One experiment. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    /// Compact weight spec such as `theta_omega:2` or `poly_log:1,1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// One x or a list; integers, or strings like `"1e6"`.
    #[serde(default, deserialize_with = "de_counts", skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Polynomial-regime exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Polynomial-regime scale `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Permutation size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Smoothness parameters `u` (`y = x^{1/u}`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u32>,
    /// When set, the command's headline metric must not exceed it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junit: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        ExperimentConfig {
            command,
            weight: None,
            x: Vec::new(),
            statistic: None,
            target: None,
            samples: None,
            exact: false,
            seed: 0,
            output: None,
            theta: None,
            gamma: None,
            k: None,
            n: None,
            u: Vec::new(),
            u_max: None,
            step: None,
            primes: Vec::new(),
            kmax: None,
            tolerance: None,
            scale: None,
            junit: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let (Some(t), implied) = (self.target, self.command.implied_target()) {
            if Some(t) != implied {
                return Err(ConfigError(format!(
                    "target {t:?} does not match command `{}`",
                    self.command
                )));
            }
        }
        if self.x.iter().any(|&x| x < 1) {
            return Err(ConfigError("x must be >= 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(ConfigError("tolerance must be >= 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(untagged)]
enum CountValue {
    Int(u64),
    Float(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(CountValue),
    Many(Vec<CountValue>),
}

fn count_value(v: CountValue) -> Result<u64, String> {
    match v {
        CountValue::Int(i) => Ok(i),
        CountValue::Float(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.9e19 => Ok(f as u64),
        CountValue::Float(f) => Err(format!("{f} is not a non-negative integer")),
        CountValue::Text(s) => anatomy_core::arith::parse_count(&s).map_err(|e| e.to_string()),
    }
}

fn de_counts<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
    let values = match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    };
    values.into_iter().map(|v| count_value(v).map_err(de::Error::custom)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_x_forms() {
        let c = ExperimentConfig::from_json(r#"{"command":"sum","weight":"power:0","x":["1e4",100000,1e6]}"#).unwrap();
        assert_eq!(c.command, CommandKind::SieveSum);
        assert_eq!(c.x, vec![10_000, 100_000, 1_000_000]);
        let c = ExperimentConfig::from_json(r#"{"command":"dickman","x":"1e3"}"#).unwrap();
        assert_eq!(c.x, vec![1000]);
    }

    #[test]
    fn rejects_unknown_keys_and_mismatched_target() {
        let e = ExperimentConfig::from_json(r#"{"command":"sum","wieght":"power:0"}"#).unwrap_err();
        assert!(e.0.contains("unknown field"), "{e}");
        assert!(ExperimentConfig::from_json(r#"{"command":"smooth","target":"normal"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"smooth","target":"dickman"}"#).is_ok());
        assert!(ExperimentConfig::from_json(r#"{"command":"sum","x":2.5}"#).is_err());
    }

    #[test]
    fn serializes_back_to_same_config() {
        let text = r#"{"command":"ek-compare","weight":"theta_omega:2","x":[10000],"exact":true,"seed":3}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
