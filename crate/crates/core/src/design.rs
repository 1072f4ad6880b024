//! Allocation designs: equal (ER), fixed unequal (FUR) and response-adaptive
//! (RAR) randomisation.
//!
//! Fixed designs realise exact arm counts through either the random
//! allocation rule or permuted blocks. The adaptive design allocates a
//! burn-in of patients 1:1 in blocks of two, then follows the efficient
//! randomised-adaptive design (ERADE) aimed at the estimated Neyman target:
//! the treatment probability is pulled towards the target by the tuning
//! constant `gamma` whenever the current treatment proportion is off target.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::endpoint::EndpointKind;
use crate::error::{Error, Result};
use crate::neyman::{neyman_rho_binary, neyman_rho_sd};

/// Control:treatment allocation ratio, both parts at least 1. Serialised
/// as `"r0:r1"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Ratio {
    control: u32,
    treatment: u32,
}

impl Ratio {
    pub const EQUAL: Ratio = Ratio {
        control: 1,
        treatment: 1,
    };

    pub fn new(control: u32, treatment: u32) -> Result<Self> {
        if control == 0 || treatment == 0 {
            return Err(Error::config(
                "ratio",
                format!("ratio components must be >= 1, got {control}:{treatment}"),
            ));
        }
        Ok(Ratio { control, treatment })
    }

    pub fn control(&self) -> u32 {
        self.control
    }

    pub fn treatment(&self) -> u32 {
        self.treatment
    }

    pub fn total(&self) -> u32 {
        self.control + self.treatment
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.control, self.treatment)
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Ratio {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl std::str::FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(
                "ratio",
                format!("expected `r0:r1` with positive integers, got `{s}`"),
            )
        };
        let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
        let a = a.trim().parse::<u32>().map_err(|_| bad())?;
        let b = b.trim().parse::<u32>().map_err(|_| bad())?;
        Ratio::new(a, b)
    }
}

/// How a fixed design turns target counts into an assignment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Procedure {
    /// Uniform over all sequences with the target counts.
    #[default]
    RandomAllocationRule,
    /// Consecutive blocks each holding the ratio exactly; a trailing partial
    /// block receives whatever counts remain.
    PermutedBlock { block_size: usize },
}

/// Estimator of the binary success rates that feed the adaptive target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryEstimator {
    /// Raw proportions s/n. An arm with all-0 or all-1 outcomes has
    /// zero estimated SD and pulls the target to 0 or 1.
    #[default]
    Mle,
    /// (s + 0.5) / (n + 1), which keeps the target strictly inside (0, 1).
    Shrunk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveParams {
    /// Patients allocated 1:1 before adaptation starts. Even and >= 4.
    pub burn_in: usize,
    /// ERADE tuning constant in [0, 1).
    pub gamma: f64,
    pub estimator: BinaryEstimator,
}

impl AdaptiveParams {
    pub const DEFAULT_GAMMA: f64 = 0.5;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignSpec {
    Equal { procedure: Procedure },
    FixedUnequal { ratio: Ratio, procedure: Procedure },
    Adaptive(AdaptiveParams),
}

impl DesignSpec {
    /// Fixed ratio of a non-adaptive design.
    pub fn ratio(&self) -> Option<Ratio> {
        match *self {
            DesignSpec::Equal { .. } => Some(Ratio::EQUAL),
            DesignSpec::FixedUnequal { ratio, .. } => Some(ratio),
            DesignSpec::Adaptive(_) => None,
        }
    }

    /// Short name used in reports, e.g. `ER`, `FUR (1:2)`, `RAR (burn-in 12)`.
    pub fn label(&self) -> String {
        match self {
            DesignSpec::Equal { .. } => "ER".to_string(),
            DesignSpec::FixedUnequal { ratio, .. } => format!("FUR ({ratio})"),
            DesignSpec::Adaptive(p) => format!("RAR (burn-in {})", p.burn_in),
        }
    }

    /// Checks the design against a trial size and endpoint.
    pub fn validate(&self, n_total: usize, kind: EndpointKind) -> Result<()> {
        match *self {
            DesignSpec::Equal { procedure } | DesignSpec::FixedUnequal { procedure, .. } => {
                let ratio = self.ratio().expect("fixed design has a ratio");
                let (n0, n1) = target_counts(n_total, ratio)?;
                if kind == EndpointKind::Continuous && (n0 < 2 || n1 < 2) {
                    return Err(Error::config(
                        "n_total",
                        format!(
                            "{} gives arm sizes ({n0}, {n1}); continuous analysis needs at least 2 per arm",
                            self.label()
                        ),
                    ));
                }
                check_procedure(procedure, ratio)
            }
            DesignSpec::Adaptive(p) => {
                if p.burn_in < 4 || p.burn_in % 2 != 0 {
                    return Err(Error::config(
                        "burn_in",
                        format!("burn_in must be an even number >= 4, got {}", p.burn_in),
                    ));
                }
                if p.burn_in >= n_total {
                    return Err(Error::config(
                        "burn_in",
                        format!(
                            "burn_in ({}) must be smaller than n_total ({n_total})",
                            p.burn_in
                        ),
                    ));
                }
                if !(0.0..1.0).contains(&p.gamma) {
                    return Err(Error::config(
                        "gamma",
                        format!("gamma must lie in [0, 1), got {}", p.gamma),
                    ));
                }
                Ok(())
            }
        }
    }
}

fn check_procedure(procedure: Procedure, ratio: Ratio) -> Result<()> {
    if let Procedure::PermutedBlock { block_size } = procedure {
        let unit = ratio.total() as usize;
        if block_size == 0 || block_size % unit != 0 {
            return Err(Error::config(
                "block_size",
                format!(
                    "block size {block_size} is not a positive multiple of {unit} (ratio {ratio})"
                ),
            ));
        }
    }
    Ok(())
}

/// Arm sizes for a fixed ratio. The control count is rounded half away from
/// zero; the treatment arm takes the rest.
pub fn target_counts(n_total: usize, ratio: Ratio) -> Result<(usize, usize)> {
    if n_total < 2 {
        return Err(Error::config(
            "n_total",
            format!("n_total must be >= 2 so both arms are populated, got {n_total}"),
        ));
    }
    let (r0, tot) = (ratio.control() as u64, ratio.total() as u64);
    let n = n_total as u64;
    // round(n * r0 / tot) in integers: floor((2 n r0 + tot) / (2 tot))
    let n0 = ((2 * n * r0 + tot) / (2 * tot)) as usize;
    let n1 = n_total - n0;
    if n0 == 0 || n1 == 0 {
        return Err(Error::config(
            "ratio",
            format!("ratio {ratio} leaves an empty arm at n_total = {n_total}"),
        ));
    }
    Ok((n0, n1))
}

/// Full assignment sequence of a fixed design (0 = control, 1 = treatment).
pub fn fixed_sequence<R: Rng + ?Sized>(
    n_total: usize,
    ratio: Ratio,
    procedure: Procedure,
    rng: &mut R,
) -> Result<Vec<u8>> {
    check_procedure(procedure, ratio)?;
    let (n0, n1) = target_counts(n_total, ratio)?;
    let mut seq = Vec::with_capacity(n_total);
    match procedure {
        Procedure::RandomAllocationRule => {
            seq.resize(n0, 0);
            seq.resize(n_total, 1);
            seq.shuffle(rng);
        }
        Procedure::PermutedBlock { block_size } => {
            let per_unit = block_size / ratio.total() as usize;
            let b0 = per_unit * ratio.control() as usize;
            let b1 = per_unit * ratio.treatment() as usize;
            let full = n_total / block_size;
            for _ in 0..full {
                push_block(&mut seq, b0, b1, rng);
            }
            push_block(&mut seq, n0 - full * b0, n1 - full * b1, rng);
        }
    }
    Ok(seq)
}

fn push_block<R: Rng + ?Sized>(seq: &mut Vec<u8>, zeros: usize, ones: usize, rng: &mut R) {
    let start = seq.len();
    seq.extend(std::iter::repeat_n(0u8, zeros));
    seq.extend(std::iter::repeat_n(1u8, ones));
    seq[start..].shuffle(rng);
}

/// Running count, sum and sum of squared deviations of one arm's outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmStats {
    pub n: usize,
    pub sum: f64,
    pub mean: f64,
    /// Sum of squared deviations from the running mean (Welford).
    pub ssd: f64,
}

impl ArmStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.ssd += delta * (x - self.mean);
    }

    /// Sample SD with divisor n - 1.
    pub fn sample_sd(&self) -> Option<f64> {
        (self.n >= 2).then(|| (self.ssd.max(0.0) / (self.n - 1) as f64).sqrt())
    }
}

/// Per-arm data accrued so far in a trial. Outcomes are recorded as soon as
/// a patient is assigned.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AssignmentState {
    pub arms: [ArmStats; 2],
}

impl AssignmentState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, arm: u8, outcome: f64) {
        self.arms[arm as usize].push(outcome);
    }

    pub fn n0(&self) -> usize {
        self.arms[0].n
    }

    pub fn n1(&self) -> usize {
        self.arms[1].n
    }

    pub fn total(&self) -> usize {
        self.n0() + self.n1()
    }

    pub fn treatment_fraction(&self) -> f64 {
        self.n1() as f64 / self.total() as f64
    }
}

/// Estimated Neyman proportion for the treatment arm, in [0, 1].
pub fn estimate_target(
    state: &AssignmentState,
    kind: EndpointKind,
    estimator: BinaryEstimator,
) -> Result<f64> {
    for (i, arm) in state.arms.iter().enumerate() {
        if arm.n < 2 {
            return Err(Error::InsufficientData(format!(
                "arm {i} has {} outcomes, at least 2 are needed to estimate its SD",
                arm.n
            )));
        }
    }
    let [a0, a1] = &state.arms;
    match kind {
        EndpointKind::Binary => match estimator {
            BinaryEstimator::Mle => {
                let sd = |a: &ArmStats| {
                    let p = a.sum / a.n as f64;
                    (p * (1.0 - p)).max(0.0).sqrt()
                };
                let (sd0, sd1) = (sd(a0), sd(a1));
                if sd0 + sd1 == 0.0 {
                    Ok(0.5)
                } else {
                    Ok(sd1 / (sd0 + sd1))
                }
            }
            BinaryEstimator::Shrunk => {
                let p = |a: &ArmStats| (a.sum + 0.5) / (a.n as f64 + 1.0);
                Ok(neyman_rho_binary(p(a0), p(a1))?.rho1())
            }
        },
        EndpointKind::Continuous => {
            let sd = |a: &ArmStats| {
                let s = a.sample_sd().expect("checked n >= 2");
                if s > 0.0 {
                    s
                } else {
                    1e-12 * a.mean.abs().max(1.0)
                }
            };
            Ok(neyman_rho_sd(sd(a0), sd(a1))?.rho1())
        }
    }
}

/// ERADE allocation probability given a target `rho` and the current
/// treatment fraction.
pub fn erade_probability(rho: f64, fraction: f64, gamma: f64) -> f64 {
    let p = if fraction > rho {
        gamma * rho
    } else if fraction < rho {
        1.0 - gamma * (1.0 - rho)
    } else {
        rho
    };
    p.clamp(0.0, 1.0)
}

/// Probability that the next patient of an adaptive trial goes to treatment.
pub fn rar_next_probability(
    state: &AssignmentState,
    params: &AdaptiveParams,
    kind: EndpointKind,
) -> Result<f64> {
    let total = state.total();
    if total < params.burn_in {
        // 1:1 blocks of two: an odd position completes the block on the
        // arm that is one patient behind.
        return Ok(match state.n0().cmp(&state.n1()) {
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => 0.0,
        });
    }
    if total == 0 {
        return Err(Error::InsufficientData(
            "adaptation requires observed outcomes but no patient has been assigned".into(),
        ));
    }
    let rho = estimate_target(state, kind, params.estimator)?;
    Ok(erade_probability(
        rho,
        state.treatment_fraction(),
        params.gamma,
    ))
}
