//! JSON scenario files.
//!
//! ```json
//! {
//!   "endpoint": "binary",
//!   "arms": { "control": { "p": 0.05 }, "treatment": { "p": 0.3 } },
//!   "null_arms": { "control": { "p": 0.05 }, "treatment": { "p": 0.05 } },
//!   "n_total": 60,
//!   "alpha": 0.05,
//!   "designs": [
//!     { "kind": "ER" },
//!     { "kind": "FUR", "ratio": "1:2" },
//!     { "kind": "RAR", "burn_in": 12, "gamma": 0.5 }
//!   ],
//!   "replications": 100000,
//!   "seed": 20251016
//! }
//! ```
//!
//! Continuous arms use `{ "mu": .., "sigma": .. }`. Fixed designs accept an
//! optional `procedure` (`{"type": "random_allocation_rule"}` or
//! `{"type": "permuted_block", "block_size": 6}`); RAR designs accept an
//! optional `estimator` (`"mle"` or `"shrunk"`).

use serde::{Deserialize, Serialize};

use crate::design::{AdaptiveParams, BinaryEstimator, DesignSpec, Procedure, Ratio};
use crate::endpoint::{ArmPair, EndpointKind, EndpointModel};
use crate::engine::{ScenarioConfig, DEFAULT_REPLICATIONS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmsFile {
    pub control: ArmFile,
    pub treatment: ArmFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DesignFile {
    #[serde(rename = "ER")]
    Equal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        procedure: Option<Procedure>,
    },
    #[serde(rename = "FUR")]
    FixedUnequal {
        ratio: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        procedure: Option<Procedure>,
    },
    #[serde(rename = "RAR")]
    Adaptive {
        burn_in: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        estimator: Option<BinaryEstimator>,
    },
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

/// On-disk form of a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub endpoint: EndpointKind,
    pub arms: ArmsFile,
    pub null_arms: ArmsFile,
    pub n_total: usize,
    pub alpha: f64,
    pub designs: Vec<DesignFile>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
}

impl ConfigFile {
    /// Parses JSON. Errors name the offending key as a dotted path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            Error::Config {
                key,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Validated in-memory scenario.
    pub fn to_scenario(&self) -> Result<ScenarioConfig> {
        let arms_alt = self.arm_pair(&self.arms, "arms")?;
        let arms_null = self.arm_pair(&self.null_arms, "null_arms")?;
        let designs = self
            .designs
            .iter()
            .enumerate()
            .map(|(i, d)| design_spec(d).map_err(|e| prefix_key(e, &format!("designs[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        let scenario = ScenarioConfig {
            arms_null,
            arms_alt,
            designs,
            n_total: self.n_total,
            alpha: self.alpha,
            replications: self.replications,
            master_seed: self.seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn arm_pair(&self, arms: &ArmsFile, key: &str) -> Result<ArmPair> {
        let control = self.arm(&arms.control, &format!("{key}.control"))?;
        let treatment = self.arm(&arms.treatment, &format!("{key}.treatment"))?;
        ArmPair::new(control, treatment).map_err(|e| Error::config(key, e.to_string()))
    }

    fn arm(&self, arm: &ArmFile, key: &str) -> Result<EndpointModel> {
        match self.endpoint {
            EndpointKind::Binary => {
                if arm.mu.is_some() || arm.sigma.is_some() {
                    return Err(Error::config(key, "binary arms take only `p`"));
                }
                let p = arm.p.ok_or_else(|| {
                    Error::config(format!("{key}.p"), "missing success probability")
                })?;
                EndpointModel::binary(p)
                    .map_err(|e| Error::config(format!("{key}.p"), e.to_string()))
            }
            EndpointKind::Continuous => {
                if arm.p.is_some() {
                    return Err(Error::config(
                        key,
                        "continuous arms take `mu` and `sigma`, not `p`",
                    ));
                }
                let mu = arm
                    .mu
                    .ok_or_else(|| Error::config(format!("{key}.mu"), "missing mean"))?;
                let sigma = arm.sigma.ok_or_else(|| {
                    Error::config(format!("{key}.sigma"), "missing standard deviation")
                })?;
                EndpointModel::continuous(mu, sigma).map_err(|e| Error::config(key, e.to_string()))
            }
        }
    }
}

fn prefix_key(err: Error, prefix: &str) -> Error {
    match err {
        Error::Config { key, message } => Error::Config {
            key: format!("{prefix}.{key}"),
            message,
        },
        other => Error::config(prefix, other.to_string()),
    }
}

fn design_spec(d: &DesignFile) -> Result<DesignSpec> {
    Ok(match d {
        DesignFile::Equal { procedure } => DesignSpec::Equal {
            procedure: procedure.unwrap_or_default(),
        },
        DesignFile::FixedUnequal { ratio, procedure } => DesignSpec::FixedUnequal {
            ratio: ratio.parse::<Ratio>()?,
            procedure: procedure.unwrap_or_default(),
        },
        DesignFile::Adaptive {
            burn_in,
            gamma,
            estimator,
        } => DesignSpec::Adaptive(AdaptiveParams {
            burn_in: *burn_in,
            gamma: gamma.unwrap_or(AdaptiveParams::DEFAULT_GAMMA),
            estimator: estimator.unwrap_or_default(),
        }),
    })
}
