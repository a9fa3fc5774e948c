//! Runnable versions of the constructions: scaling radii, the scaled
//! sphere polytope and its rate experiment, the exact one-dimensional
//! baseline, a local search, and the Monte Carlo validation suite.

mod appendix_b;
mod scaling;
mod search;
mod suite;
mod theorem1;

pub use appendix_b::{appendix_b_expectation, appendix_b_expectation_quadrature};
pub use scaling::{missed_volume, scaling_factor, ScalingFactor, ScalingMode};
pub use search::{best_approx_search, SearchOutcome, SearchSummary, STEP_DECAY};
pub use suite::{lemma_validation_suite, registered_check_count, SuiteReport, SuiteRow, CAP_HEIGHTS, SUITE_SAMPLES};
pub use theorem1::{
    construction_beta, theorem1_bound, theorem1_polytope, theorem1_run, ExperimentResult, ExperimentRow,
    ExperimentSpec, Theorem1Polytope,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;
