//! The radius `t` that makes the annulus `B_n ∖ t·B_n` as large as the
//! expected volume missed by a beta polytope.

use crate::beta::BetaParams;
use crate::caps::affentranger_a;
use crate::error::{Error, Result};
use crate::geom::planar::{convex_hull, polygon_area, Point2};
use crate::geom::Vector;
use crate::metrics::MetricConfig;
use crate::rng::{fork_seed, substream};
use crate::special::{ball_volume, sphere_area};
use crate::stats::{Accumulator, McEstimate};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the scaling radius is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ScalingMode {
    /// `t = 1 − (A_{n,β}/ω_n) N^{−2/(n+2β+1)}`.
    Asymptotic,
    /// Solves `(1 − tⁿ)κ_n = E vol(B_n ∖ P)` with the expectation estimated
    /// from `replicates` random polytopes.
    Empirical { replicates: usize, volume_samples: usize },
    /// No scaling (`t = 1`): the inscribed polytope.
    None,
}

impl std::fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalingMode::Asymptotic => write!(f, "asymptotic"),
            ScalingMode::Empirical { .. } => write!(f, "empirical"),
            ScalingMode::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactor {
    pub t: f64,
    /// Zero for the asymptotic and unscaled modes.
    pub std_error: f64,
    /// Set for `β = −1`, where the constant comes from continuing the gamma
    /// expressions beyond the range the asymptotics were proved for.
    pub extrapolated: bool,
}

/// Expected missed volume `E vol_n(B_n ∖ P)` over `replicates` beta polytopes
/// with `n_points` vertices.
///
/// Exact per replicate for `n ≤ 2`; in higher dimension the hull volume is
/// estimated with `volume_samples` radial directions.
pub fn missed_volume<R: Rng + ?Sized>(
    params: BetaParams,
    n_points: usize,
    replicates: usize,
    volume_samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    if replicates < 2 {
        return Err(Error::param("need at least two replicates"));
    }
    let n = params.n;
    let kappa = ball_volume(n);
    let seed = fork_seed(rng);
    let cfg = MetricConfig {
        volume_samples: volume_samples.max(1),
        ..MetricConfig::default()
    };
    let values: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut s = substream(seed, &[r]);
            let pts: Vec<Vector> = (0..n_points).map(|_| params.sample(&mut s)).collect();
            let inside = match n {
                1 => {
                    let (lo, hi) = pts
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
                    hi - lo
                }
                2 => {
                    let planar: Vec<Point2> = pts.iter().map(|p| Point2::new(p[0], p[1])).collect();
                    polygon_area(&convex_hull(&planar))
                }
                _ => crate::metrics::hull_volume(pts, &cfg, &mut s)?.value,
            };
            Ok(kappa - inside)
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().collect::<Accumulator>().estimate())
}

/// The scaling radius `t_{n,N,β}`.
pub fn scaling_factor<R: Rng + ?Sized>(
    n: usize,
    n_points: usize,
    beta: f64,
    mode: ScalingMode,
    rng: &mut R,
) -> Result<ScalingFactor> {
    let params = BetaParams::new(n, beta)?;
    if n_points < n + 1 {
        return Err(Error::param(format!("need N ≥ n + 1 = {}, got {n_points}", n + 1)));
    }
    let extrapolated = params.is_sphere();
    match mode {
        ScalingMode::None => Ok(ScalingFactor {
            t: 1.0,
            std_error: 0.0,
            extrapolated: false,
        }),
        ScalingMode::Asymptotic => {
            let m = n as f64 + 2.0 * beta + 1.0;
            let gamma = affentranger_a(n, beta)? / sphere_area(n) * (n_points as f64).powf(-2.0 / m);
            if gamma >= 1.0 {
                return Err(Error::DegenerateN {
                    n_vertices: n_points,
                    detail: format!("asymptotic shrink {gamma:.4} leaves no positive radius"),
                });
            }
            Ok(ScalingFactor {
                t: 1.0 - gamma,
                std_error: 0.0,
                extrapolated,
            })
        }
        ScalingMode::Empirical {
            replicates,
            volume_samples,
        } => {
            let missed = missed_volume(params, n_points, replicates, volume_samples, rng)?;
            let kappa = ball_volume(n);
            let fraction = missed.value / kappa;
            if fraction >= 1.0 {
                return Err(Error::DegenerateN {
                    n_vertices: n_points,
                    detail: format!("estimated missed volume {:.4} reaches the ball volume", missed.value),
                });
            }
            let nf = n as f64;
            let t = (1.0 - fraction).powf(1.0 / nf);
            // Delta method: dt/dE = −t^{1−n}/(n κ_n).
            let std_error = missed.std_error * t.powf(1.0 - nf) / (nf * kappa);
            Ok(ScalingFactor {
                t,
                std_error,
                extrapolated,
            })
        }
    }
}
