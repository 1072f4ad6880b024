//! Neyman allocation: the split of a fixed total sample that maximises the
//! noncentrality of the unpooled Wald statistic. The optimal ratio of
//! treatment to control patients equals the ratio of their outcome standard
//! deviations, so the treatment proportion is `sd1 / (sd0 + sd1)`.
//!
//! For binary endpoints with `p0 = 0.05, p1 = 0.3` this gives roughly 0.678,
//! i.e. about a 1:2 control:treatment split. Note that 0.678 is the
//! allocation *proportion*; the SD ratio itself is about 2.10.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Proportion of patients on the equal-randomisation design.
pub const EQUAL_RANDOMISATION_RHO: f64 = 0.5;

/// Target proportion of patients on the treatment arm, strictly in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AllocationTarget(f64);

impl AllocationTarget {
    pub fn new(rho1: f64) -> Result<Self> {
        if rho1 > 0.0 && rho1 < 1.0 {
            Ok(AllocationTarget(rho1))
        } else {
            Err(Error::domain(format!(
                "allocation proportion {rho1} outside (0, 1)"
            )))
        }
    }

    pub fn rho1(self) -> f64 {
        self.0
    }

    /// Treatment-to-control ratio n1/n0.
    pub fn odds(self) -> f64 {
        self.0 / (1.0 - self.0)
    }
}

pub fn neyman_rho_sd(sigma0: f64, sigma1: f64) -> Result<AllocationTarget> {
    if !(sigma0 > 0.0 && sigma0.is_finite() && sigma1 > 0.0 && sigma1.is_finite()) {
        return Err(Error::domain(format!(
            "standard deviations must be positive and finite, got ({sigma0}, {sigma1})"
        )));
    }
    AllocationTarget::new(sigma1 / (sigma0 + sigma1))
}

pub fn neyman_rho_binary(p0: f64, p1: f64) -> Result<AllocationTarget> {
    for (name, p) in [("p0", p0), ("p1", p1)] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("{name} = {p} must lie in (0, 1)")));
        }
    }
    neyman_rho_sd((p0 * (1.0 - p0)).sqrt(), (p1 * (1.0 - p1)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p1: f64,
    pub rho_n1: f64,
    pub rho_er: f64,
}

/// Neyman and equal-randomisation proportions along a grid of treatment
/// success rates, for a fixed control rate. Rows follow the input order.
pub fn neyman_curve(p0: f64, p1_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    p1_grid
        .iter()
        .map(|&p1| {
            Ok(CurvePoint {
                p1,
                rho_n1: neyman_rho_binary(p0, p1)?.rho1(),
                rho_er: EQUAL_RANDOMISATION_RHO,
            })
        })
        .collect()
}

/// Evenly spaced grid from `start` to `stop` inclusive. Points are computed
/// by index and rounded to 12 decimals so that e.g. 0.07 prints as 0.07.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::domain(format!(
            "grid needs start <= stop and step > 0, got ({start}, {stop}, {step})"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Grid used when none is supplied: 0.01 to 0.99 by 0.01.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}
