//! Intrinsic volume metrics between convex bodies.
//!
//! The crate estimates intrinsic volumes and the metrics built from them by
//! averaging projections over random subspaces, samples beta random
//! polytopes, and runs the ball-approximation experiments on top of these.

pub mod beta;
pub mod caps;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod metrics;
pub mod rng;
pub mod special;
pub mod stats;

pub use beta::BetaParams;
pub use error::{Error, Result};
pub use geom::{ConvexBody, OrthonormalFrame, Vector};
pub use stats::McEstimate;
pub use experiments::{ExperimentResult, ExperimentSpec, ScalingMode};
pub use metrics::MetricConfig;
