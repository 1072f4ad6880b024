//! Per-arm outcome laws.
//!
//! A trial compares two arms, control (arm 0) and treatment (arm 1), that
//! share an endpoint kind. Binary arms are Bernoulli(p); continuous arms are
//! Normal(mu, sigma). For a Bernoulli arm the outcome variance is p(1 - p),
//! so the standard deviation is fixed by the success rate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Binary,
    Continuous,
}

/// Outcome distribution of a single arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointModel {
    Binary { p: f64 },
    Continuous { mu: f64, sigma: f64 },
}

impl EndpointModel {
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "success probability {p} outside [0, 1]"
            )));
        }
        Ok(EndpointModel::Binary { p })
    }

    pub fn continuous(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("mean {mu} is not finite")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!(
                "standard deviation {sigma} must be > 0"
            )));
        }
        Ok(EndpointModel::Continuous { mu, sigma })
    }

    pub fn kind(&self) -> EndpointKind {
        match self {
            EndpointModel::Binary { .. } => EndpointKind::Binary,
            EndpointModel::Continuous { .. } => EndpointKind::Continuous,
        }
    }

    pub fn true_mean(&self) -> f64 {
        match *self {
            EndpointModel::Binary { p } => p,
            EndpointModel::Continuous { mu, .. } => mu,
        }
    }

    pub fn true_sd(&self) -> f64 {
        match *self {
            EndpointModel::Binary { p } => (p * (1.0 - p)).sqrt(),
            EndpointModel::Continuous { sigma, .. } => sigma,
        }
    }

    /// Draws one patient outcome. Binary draws are 0.0 or 1.0; normal draws
    /// use the ziggurat standard normal from `rand_distr`, scaled and shifted.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            // random::<f64>() is in [0, 1), so p = 0 never succeeds and p = 1 always does
            EndpointModel::Binary { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            EndpointModel::Continuous { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
        }
    }
}

/// Control and treatment outcome laws of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPair {
    control: EndpointModel,
    treatment: EndpointModel,
}

impl ArmPair {
    pub fn new(control: EndpointModel, treatment: EndpointModel) -> Result<Self> {
        if control.kind() != treatment.kind() {
            return Err(Error::domain(
                "control and treatment arms must share an endpoint kind",
            ));
        }
        Ok(ArmPair { control, treatment })
    }

    pub fn control(&self) -> &EndpointModel {
        &self.control
    }

    pub fn treatment(&self) -> &EndpointModel {
        &self.treatment
    }

    /// Arm 0 is control, anything else is treatment.
    pub fn arm(&self, arm: usize) -> &EndpointModel {
        if arm == 0 {
            &self.control
        } else {
            &self.treatment
        }
    }

    pub fn kind(&self) -> EndpointKind {
        self.control.kind()
    }
}
