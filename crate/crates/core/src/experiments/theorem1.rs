//! The scaled uniform-sphere polytope and the rate experiment built on it.

use super::scaling::{scaling_factor, ScalingFactor, ScalingMode};
use crate::beta::sample_sphere;
use crate::caps::flag_coefficient;
use crate::error::{Error, Result};
use crate::geom::{ConvexBody, Vector};
use crate::metrics::{delta_j, MetricConfig};
use crate::rng::substream;
use crate::special::ball_volume;
use crate::stats::{weighted_line_fit, Accumulator, LineFit};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parameter of the beta law whose scaling radius inflates the polytope
/// for the `j`-th metric: `(n − j − 2)/2`, which is `−1` when `j = n`.
pub fn construction_beta(n: usize, j: usize) -> f64 {
    (n as f64 - j as f64 - 2.0) / 2.0
}

/// One realization of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Polytope {
    /// Sphere points scaled by `1/t`.
    pub scaled: ConvexBody,
    /// The same points on the sphere.
    pub inscribed: ConvexBody,
    pub scaling: ScalingFactor,
}

fn sphere_points<R: Rng + ?Sized>(n: usize, n_points: usize, rng: &mut R) -> Vec<Vector> {
    (0..n_points).map(|_| sample_sphere(n, rng)).collect()
}

fn build(points: Vec<Vector>, scaling: ScalingFactor) -> Result<Theorem1Polytope> {
    let inscribed = ConvexBody::polytope(points)?;
    Ok(Theorem1Polytope {
        scaled: inscribed.scaled(1.0 / scaling.t)?,
        inscribed,
        scaling,
    })
}

fn check_dims(n: usize, j: usize, n_points: usize) -> Result<()> {
    if n < 2 || j == 0 || j > n {
        return Err(Error::param(format!("need n ≥ 2 and 1 ≤ j ≤ n, got n={n}, j={j}")));
    }
    if n_points < n + 1 {
        return Err(Error::param(format!("need N ≥ n + 1 = {}, got {n_points}", n + 1)));
    }
    Ok(())
}

/// `N` uniform points on `S^{n−1}` scaled by `1/t_{j,N,(n−j−2)/2}` with the
/// asymptotic scaling radius.
pub fn theorem1_polytope<R: Rng + ?Sized>(n: usize, j: usize, n_points: usize, rng: &mut R) -> Result<Theorem1Polytope> {
    check_dims(n, j, n_points)?;
    let scaling = scaling_factor(j, n_points, construction_beta(n, j), ScalingMode::Asymptotic, rng)?;
    build(sphere_points(n, n_points, rng), scaling)
}

/// Declarative description of a rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n: usize,
    pub j: usize,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub cfg: MetricConfig,
    pub scaling: ScalingMode,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::param("the N grid is empty"));
        }
        for &n_points in &self.n_grid {
            check_dims(self.n, self.j, n_points)?;
        }
        if self.reps == 0 {
            return Err(Error::param("reps must be at least 1"));
        }
        self.cfg.validate()
    }
}

/// One grid point of a rate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n_vertices: usize,
    /// Mean of `δ_j(B_n, Q)` over the replicates.
    pub mean: f64,
    pub std_error: f64,
    /// `2j/(n−1)·V_j(B_n)·N^{−2/(n−1)}`.
    pub bound: f64,
    pub ratio: f64,
    pub t: f64,
    /// Mean `δ_j` of the unscaled inscribed polytopes on the same points.
    pub inscribed_mean: f64,
    /// Mean of the paired differences inscribed − scaled.
    pub improvement: f64,
    pub improvement_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<ExperimentRow>,
    /// Weighted least-squares line through `(ln N, ln mean)`.
    pub fit: LineFit,
    /// The construction used the sphere-limit scaling (`j = n`).
    pub extrapolated: bool,
}

/// `2j/(n−1)·V_j(B_n)·N^{−2/(n−1)}`.
pub fn theorem1_bound(n: usize, j: usize, n_points: usize) -> Result<f64> {
    check_dims(n, j, n_points)?;
    let nf = n as f64;
    let vj = flag_coefficient(n, j)? * ball_volume(j);
    Ok(2.0 * j as f64 / (nf - 1.0) * vj * (n_points as f64).powf(-2.0 / (nf - 1.0)))
}

/// Runs the construction for every `N` in the grid, `reps` times each, and
/// fits the decay rate.
///
/// Replicate `r` at grid value `N` draws its points from substream
/// `(seed, N, r, 0)` and its estimator seed from `(seed, N, r, 1)`; the
/// scaled and inscribed polytopes share both, so their difference is a
/// paired comparison. Results do not depend on the number of threads.
pub fn theorem1_run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    if spec.n_grid.len() < 3 {
        return Err(Error::param(format!(
            "a rate fit needs at least 3 grid points, got {}",
            spec.n_grid.len()
        )));
    }
    let (n, j) = (spec.n, spec.j);
    let beta = construction_beta(n, j);
    let ball = ConvexBody::centered_ball(n, 1.0)?;
    let mut rows = Vec::with_capacity(spec.n_grid.len());
    let mut extrapolated = false;
    for &n_points in &spec.n_grid {
        let tag = n_points as u64;
        let scaling = scaling_factor(j, n_points, beta, spec.scaling, &mut substream(spec.seed, &[tag, u64::MAX]))?;
        extrapolated |= scaling.extrapolated;
        let pairs: Vec<(f64, f64)> = (0..spec.reps as u64)
            .into_par_iter()
            .map(|r| {
                let points = sphere_points(n, n_points, &mut substream(spec.seed, &[tag, r, 0]));
                let poly = build(points, scaling)?;
                let est_seed = &mut substream(spec.seed, &[tag, r, 1]);
                let mut paired = est_seed.clone();
                let scaled = delta_j(&ball, &poly.scaled, j, &spec.cfg, est_seed)?;
                let inscribed = delta_j(&ball, &poly.inscribed, j, &spec.cfg, &mut paired)?;
                Ok((scaled.value, inscribed.value))
            })
            .collect::<Result<_>>()?;
        let scaled: Accumulator = pairs.iter().map(|p| p.0).collect();
        let inscribed: Accumulator = pairs.iter().map(|p| p.1).collect();
        let diff: Accumulator = pairs.iter().map(|p| p.1 - p.0).collect();
        let bound = theorem1_bound(n, j, n_points)?;
        rows.push(ExperimentRow {
            n_vertices: n_points,
            mean: scaled.mean(),
            std_error: scaled.std_error(),
            bound,
            ratio: scaled.mean() / bound,
            t: scaling.t,
            inscribed_mean: inscribed.mean(),
            improvement: diff.mean(),
            improvement_std_error: diff.std_error(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.n_vertices as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    // Inverse squared relative errors; equal weights if any row is exact.
    let w: Vec<f64> = if rows.iter().all(|r| r.std_error > 0.0) {
        rows.iter().map(|r| (r.mean / r.std_error).powi(2)).collect()
    } else {
        vec![1.0; rows.len()]
    };
    let fit = weighted_line_fit(&x, &y, &w)
        .ok_or_else(|| Error::numerical("rate fit", "degenerate grid or nonpositive means"))?;
    if !fit.slope.is_finite() {
        return Err(Error::numerical("rate fit", "a mean δ_j was not positive"));
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        fit,
        extrapolated,
    })
}
