//! Fixtures shared by the benchmarks.

use trialsim_core::{
    AdaptiveParams, ArmPair, BinaryEstimator, DesignSpec, EndpointModel, Procedure, Ratio,
};

pub fn oncology_arms() -> ArmPair {
    ArmPair::new(
        EndpointModel::binary(0.05).unwrap(),
        EndpointModel::binary(0.3).unwrap(),
    )
    .unwrap()
}

pub fn phase3_arms() -> ArmPair {
    ArmPair::new(
        EndpointModel::continuous(0.0, 0.5).unwrap(),
        EndpointModel::continuous(0.5, 2.0).unwrap(),
    )
    .unwrap()
}

pub fn fur(control: u32, treatment: u32) -> DesignSpec {
    DesignSpec::FixedUnequal {
        ratio: Ratio::new(control, treatment).unwrap(),
        procedure: Procedure::RandomAllocationRule,
    }
}

pub fn rar(burn_in: usize) -> DesignSpec {
    DesignSpec::Adaptive(AdaptiveParams {
        burn_in,
        gamma: AdaptiveParams::DEFAULT_GAMMA,
        estimator: BinaryEstimator::Mle,
    })
}
