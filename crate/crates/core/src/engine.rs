//! Monte Carlo driver.
//!
//! A scenario runs every design under a null and an alternative arm pair.
//! Replications run in parallel on the current rayon pool; each one draws
//! from its own keyed stream and records are reduced in replication order,
//! so summaries are bit-identical for any pool width.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{wald_binary, wald_continuous, z_crit, TestOutcome};
use crate::design::{
    fixed_sequence, rar_next_probability, AssignmentState, DesignSpec, Procedure, Ratio,
};
use crate::endpoint::{ArmPair, EndpointKind};
use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// Replications per cell unless configured otherwise. With this count the
/// MCSE of any rejection rate is at most 0.5 / sqrt(1e5) < 0.2%.
pub const DEFAULT_REPLICATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl Hypothesis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Hypothesis::Null => "null",
            Hypothesis::Alternative => "alternative",
        }
    }

    fn stream_flag(&self) -> u64 {
        match self {
            Hypothesis::Null => 0,
            Hypothesis::Alternative => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub arms_null: ArmPair,
    pub arms_alt: ArmPair,
    pub designs: Vec<DesignSpec>,
    pub n_total: usize,
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: u64,
}

impl ScenarioConfig {
    pub fn kind(&self) -> EndpointKind {
        self.arms_alt.kind()
    }

    pub fn arms(&self, hypothesis: Hypothesis) -> &ArmPair {
        match hypothesis {
            Hypothesis::Null => &self.arms_null,
            Hypothesis::Alternative => &self.arms_alt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms_null.kind() != self.arms_alt.kind() {
            return Err(Error::config(
                "null_arms",
                "null and alternative arms must share the endpoint kind",
            ));
        }
        if self.replications < 1 {
            return Err(Error::config("replications", "replications must be ≥ 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(
                "alpha",
                format!("alpha must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if self.n_total < 2 {
            return Err(Error::config(
                "n_total",
                format!("n_total must be >= 2, got {}", self.n_total),
            ));
        }
        if self.designs.is_empty() {
            return Err(Error::config("designs", "at least one design is required"));
        }
        for design in &self.designs {
            design.validate(self.n_total, self.kind())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n0: usize,
    pub n1: usize,
    pub test: TestOutcome,
    /// Sum of every patient's outcome.
    pub outcome_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub design: String,
    pub design_index: usize,
    pub hypothesis: Hypothesis,
    pub alpha: f64,
    pub rejection_rate: f64,
    pub rejection_mcse: f64,
    /// Mean of n1 / n_total.
    pub mean_prop_arm1: f64,
    /// ENS (mean successes per trial) for binary endpoints, EMR (mean
    /// response per patient) for continuous ones.
    pub mean_outcome: f64,
    pub outcome_mcse: f64,
    pub replications: usize,
}

/// Margin above alpha beyond which a null rejection rate is reported as
/// type-I error inflation.
pub const DEFAULT_INFLATION_MARGIN: f64 = 0.008;

impl MetricsSummary {
    /// True for a null-hypothesis cell whose rejection rate exceeds
    /// `alpha + margin`.
    pub fn type1_inflated(&self, margin: f64) -> bool {
        self.hypothesis == Hypothesis::Null && self.rejection_rate > self.alpha + margin
    }
}

/// Simulates one trial and analyses it with the Wald test for its endpoint.
pub fn run_trial<R: Rng + ?Sized>(
    design: &DesignSpec,
    arms: &ArmPair,
    n_total: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<TrialRecord> {
    let kind = arms.kind();
    design.validate(n_total, kind)?;
    let mut state = AssignmentState::new();
    match design {
        DesignSpec::Equal { procedure } | DesignSpec::FixedUnequal { procedure, .. } => {
            let ratio = design.ratio().expect("fixed design has a ratio");
            for arm in fixed_sequence(n_total, ratio, *procedure, rng)? {
                let y = arms.arm(arm as usize).sample(rng);
                state.record(arm, y);
            }
        }
        DesignSpec::Adaptive(params) => {
            for _ in 0..n_total {
                let p = rar_next_probability(&state, params, kind)?;
                let arm = u8::from(rng.random::<f64>() < p);
                let y = arms.arm(arm as usize).sample(rng);
                state.record(arm, y);
            }
        }
    }
    let [a0, a1] = state.arms;
    let test = match kind {
        EndpointKind::Binary => wald_binary(a0.n, a0.sum as usize, a1.n, a1.sum as usize, alpha)?,
        EndpointKind::Continuous => {
            wald_continuous(a0.n, a0.mean, a0.ssd, a1.n, a1.mean, a1.ssd, alpha)?
        }
    };
    Ok(TrialRecord {
        n0: a0.n,
        n1: a1.n,
        test,
        outcome_total: a0.sum + a1.sum,
    })
}

/// Runs `config.replications` trials of one design under one hypothesis.
pub fn simulate_cell(
    config: &ScenarioConfig,
    design_index: usize,
    hypothesis: Hypothesis,
) -> Result<MetricsSummary> {
    let design = config
        .designs
        .get(design_index)
        .ok_or_else(|| Error::config("designs", format!("no design at index {design_index}")))?;
    let arms = config.arms(hypothesis);
    let key = StreamKey::new(
        config.master_seed,
        design_index as u64,
        hypothesis.stream_flag(),
    );
    // fail fast on config problems before fanning out
    z_crit(config.alpha)?;
    design.validate(config.n_total, arms.kind())?;

    let records = (0..config.replications)
        .into_par_iter()
        .map(|k| {
            let mut rng = key.replication(k as u64);
            run_trial(design, arms, config.n_total, config.alpha, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(summarise(
        design.label(),
        design_index,
        hypothesis,
        config,
        &records,
    ))
}

fn summarise(
    label: String,
    design_index: usize,
    hypothesis: Hypothesis,
    config: &ScenarioConfig,
    records: &[TrialRecord],
) -> MetricsSummary {
    let reps = records.len() as f64;
    let n = config.n_total as f64;
    let per_trial = |r: &TrialRecord| match config.kind() {
        EndpointKind::Binary => r.outcome_total,
        EndpointKind::Continuous => r.outcome_total / n,
    };
    let mut rejections = 0usize;
    let mut n1_sum = 0usize;
    let mut outcome_sum = 0.0;
    for r in records {
        rejections += usize::from(r.test.reject);
        n1_sum += r.n1;
        outcome_sum += per_trial(r);
    }
    let mean_outcome = outcome_sum / reps;
    let outcome_ss: f64 = records
        .iter()
        .map(|r| (per_trial(r) - mean_outcome).powi(2))
        .sum();
    let outcome_mcse = if records.len() > 1 {
        (outcome_ss / (reps - 1.0) / reps).sqrt()
    } else {
        0.0
    };
    let rate = rejections as f64 / reps;
    MetricsSummary {
        design: label,
        design_index,
        hypothesis,
        alpha: config.alpha,
        rejection_rate: rate,
        rejection_mcse: (rate * (1.0 - rate) / reps).sqrt(),
        mean_prop_arm1: n1_sum as f64 / (n * reps),
        mean_outcome,
        outcome_mcse,
        replications: records.len(),
    }
}

/// Every design under the null and then the alternative, in config order.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<Vec<MetricsSummary>> {
    config.validate()?;
    let mut out = Vec::with_capacity(2 * config.designs.len());
    for index in 0..config.designs.len() {
        for hypothesis in [Hypothesis::Null, Hypothesis::Alternative] {
            out.push(simulate_cell(config, index, hypothesis)?);
        }
    }
    Ok(out)
}

/// One row of a fixed-ratio power scan under the alternative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub ratio: Ratio,
    pub power: f64,
    pub mcse: f64,
    pub mean_outcome: f64,
    pub outcome_mcse: f64,
}

/// Power of fixed designs at each requested control:treatment ratio, using
/// the arms, size, alpha, replications and seed of `config`. A 1:1 ratio is
/// run as ER. Ratio `i` uses the random streams of design index `i`.
pub fn power_scan(config: &ScenarioConfig, ratios: &[Ratio]) -> Result<Vec<ScanRow>> {
    if ratios.is_empty() {
        return Err(Error::config("ratios", "at least one ratio is required"));
    }
    let designs = ratios
        .iter()
        .map(|&ratio| {
            let procedure = Procedure::RandomAllocationRule;
            if ratio == Ratio::EQUAL {
                DesignSpec::Equal { procedure }
            } else {
                DesignSpec::FixedUnequal { ratio, procedure }
            }
        })
        .collect();
    let scan = ScenarioConfig {
        designs,
        ..config.clone()
    };
    scan.validate()?;
    ratios
        .iter()
        .enumerate()
        .map(|(i, &ratio)| {
            let s = simulate_cell(&scan, i, Hypothesis::Alternative)?;
            Ok(ScanRow {
                ratio,
                power: s.rejection_rate,
                mcse: s.rejection_mcse,
                mean_outcome: s.mean_outcome,
                outcome_mcse: s.outcome_mcse,
            })
        })
        .collect()
}

/// Closed-form expected outcome of a trial with fixed arm sizes: expected
/// successes for binary endpoints, expected mean response for continuous ones.
pub fn analytic_expected_outcome(arms: &ArmPair, n0: usize, n1: usize) -> f64 {
    let (m0, m1) = (arms.control().true_mean(), arms.treatment().true_mean());
    let total = n0 as f64 * m0 + n1 as f64 * m1;
    match arms.kind() {
        EndpointKind::Binary => total,
        EndpointKind::Continuous => total / (n0 + n1) as f64,
    }
}
