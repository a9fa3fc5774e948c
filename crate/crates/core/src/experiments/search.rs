//! Local search for polytopes close to the ball in `δ_j`.

use super::theorem1::theorem1_polytope;
use crate::beta::sample_sphere;
use crate::error::{Error, Result};
use crate::geom::{gaussian_vector, ConvexBody, Vector};
use crate::metrics::{delta_j, MetricConfig};
use crate::rng::{fork_seed, substream, Stream};
use crate::stats::McEstimate;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Step size decay per iteration.
pub const STEP_DECAY: f64 = 0.98;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub polytope: ConvexBody,
    pub estimate: McEstimate,
    pub start: ConvexBody,
    pub start_estimate: McEstimate,
    /// Objective after each accepted move, starting with the start value.
    pub history: Vec<f64>,
    pub proposals: usize,
    /// The scaled construction was unavailable at this `N` (its radius
    /// would be nonpositive) and the search started from sphere points.
    pub started_inscribed: bool,
}

/// Summary suitable for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub start_objective: f64,
    pub final_objective: f64,
    pub final_std_error: f64,
    pub accepted: usize,
    pub proposals: usize,
    pub history: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub started_inscribed: bool,
}

impl SearchOutcome {
    pub fn summary(&self) -> SearchSummary {
        SearchSummary {
            start_objective: self.start_estimate.value,
            final_objective: self.estimate.value,
            final_std_error: self.estimate.std_error,
            accepted: self.history.len() - 1,
            proposals: self.proposals,
            history: self.history.clone(),
            vertices: self
                .polytope
                .vertices()
                .map(|vs| vs.iter().map(|v| v.iter().copied().collect()).collect())
                .unwrap_or_default(),
            started_inscribed: self.started_inscribed,
        }
    }
}

/// (1+1) search over vertex coordinates.
///
/// Each proposal moves every vertex by a Gaussian step of size
/// `σ_k = 0.2/√N · 0.98^k`, and is accepted only when it strictly lowers
/// `δ_j(B_n, ·)`. All objective evaluations share one estimator seed, so
/// comparisons are made under common random numbers.
pub fn best_approx_search<R: Rng + ?Sized>(
    n: usize,
    j: usize,
    n_vertices: usize,
    budget: usize,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let seed = fork_seed(rng);
    let mut start_rng = substream(seed, &[0]);
    let (start, started_inscribed) = match theorem1_polytope(n, j, n_vertices, &mut start_rng) {
        Ok(p) => (p.scaled, false),
        Err(Error::DegenerateN { .. }) => {
            let pts: Vec<Vector> = (0..n_vertices).map(|_| sample_sphere(n, &mut start_rng)).collect();
            (ConvexBody::polytope(pts)?, true)
        }
        Err(e) => return Err(e),
    };
    let ball = ConvexBody::centered_ball(n, 1.0)?;
    let objective = |body: &ConvexBody| -> Result<McEstimate> {
        let mut s: Stream = substream(seed, &[1]);
        delta_j(&ball, body, j, cfg, &mut s)
    };
    let start_estimate = objective(&start)?;
    let mut best = start.clone();
    let mut best_estimate = start_estimate;
    let mut history = vec![start_estimate.value];
    let mut moves = substream(seed, &[2]);
    let sigma0 = 0.2 / (n_vertices as f64).sqrt();
    for k in 0..budget {
        let sigma = sigma0 * STEP_DECAY.powi(k as i32);
        let proposal: Vec<Vector> = best
            .vertices()
            .expect("search runs over polytopes")
            .iter()
            .map(|v| v + gaussian_vector(n, &mut moves) * sigma)
            .collect();
        let proposal = ConvexBody::polytope(proposal)?;
        let est = objective(&proposal)?;
        if est.value < best_estimate.value {
            best = proposal;
            best_estimate = est;
            history.push(est.value);
        }
    }
    Ok(SearchOutcome {
        polytope: best,
        estimate: best_estimate,
        start,
        start_estimate,
        history,
        proposals: budget,
        started_inscribed,
    })
}
