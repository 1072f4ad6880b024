//! Operating characteristics of equal, fixed-unequal and response-adaptive
//! randomisation in two-arm trials analysed with the Wald test.
//!
//! The crate is organised bottom-up:
//!
//! - [`endpoint`]: Bernoulli and normal arm models.
//! - [`neyman`]: power-maximising allocation targets and curve data.
//! - [`design`]: ER/FUR sequences and the adaptive ERADE rule.
//! - [`analysis`]: unpooled Wald tests and normal critical values.
//! - [`engine`]: the parallel, seed-deterministic Monte Carlo driver.
//! - [`io`]: JSON scenario files, CSV reports and run manifests.

pub mod analysis;
pub mod design;
pub mod endpoint;
pub mod engine;
pub mod error;
pub mod io;
pub mod neyman;
pub mod rng;

pub use analysis::{wald_binary, wald_continuous, z_crit, TestOutcome};
pub use design::{AdaptiveParams, AssignmentState, BinaryEstimator, DesignSpec, Procedure, Ratio};
pub use endpoint::{ArmPair, EndpointKind, EndpointModel};
pub use engine::{
    analytic_expected_outcome, power_scan, run_monte_carlo, run_trial, simulate_cell, Hypothesis,
    MetricsSummary, ScanRow, ScenarioConfig, TrialRecord, DEFAULT_INFLATION_MARGIN,
    DEFAULT_REPLICATIONS,
};
pub use error::{Error, Result};
pub use neyman::{neyman_curve, neyman_rho_binary, neyman_rho_sd, AllocationTarget, CurvePoint};
