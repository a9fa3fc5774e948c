//! Estimators for intrinsic volumes and the distances built on them.
//!
//! Every estimator averages a per-subspace quantity over Haar subspaces
//! (Kubota's formula) and multiplies by the flag coefficient. Each call
//! forks one seed from the caller's stream; subspace `s` then draws its frame
//! from substream `(seed, s, 0)` and its inner samples from `(seed, s, 1)`.
//! Two calls made with equal seeds therefore see the same subspaces and the
//! same directions, which is how paired comparisons get common random
//! numbers.

mod local;

use crate::caps::flag_coefficient;
use crate::error::{Error, Result};
use crate::geom::body::Shadow;
use crate::geom::lp::LP_TOL;
use crate::geom::planar::{convex_hull, polygon_area, Point2};
use crate::geom::{affine_dimension, haar_subspace, ConvexBody, OrthonormalFrame, Vector};
use crate::rng::{fork_seed, substream, Stream};
use crate::special::ball_volume;
use crate::stats::{Accumulator, McEstimate};
use local::{ball_symdiff, radial_volume, shadow_volume, symdiff_volume, Local, PairGeometry};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sampling effort and tolerances for the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Haar subspaces averaged over (ignored when `j = n`).
    pub subspace_samples: usize,
    /// Directions or points per subspace when no exact evaluator applies.
    pub volume_samples: usize,
    /// Membership tolerance for hull tests.
    pub tol: f64,
    /// Use exact planar geometry for `j = 2`.
    pub exact_low_dim: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            subspace_samples: 400,
            volume_samples: 2000,
            tol: LP_TOL,
            exact_low_dim: true,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subspace_samples == 0 || self.volume_samples == 0 {
            return Err(Error::param("sample counts must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("membership tolerance must be positive"));
        }
        Ok(())
    }
}

fn check_j(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::param(format!("need 1 ≤ j ≤ n, got n={n}, j={j}")));
    }
    Ok(())
}

fn check_pair(k: &ConvexBody, l: &ConvexBody, j: usize) -> Result<usize> {
    let n = k.dim();
    if l.dim() != n {
        return Err(Error::param(format!(
            "bodies live in different dimensions ({n} and {})",
            l.dim()
        )));
    }
    check_j(n, j)?;
    Ok(n)
}

/// Averages `f(H)` over Haar `j`-subspaces of `R^n` and scales by the flag
/// coefficient. For `j = n` the only subspace is `R^n` itself.
///
/// The standard error is the spread of the per-subspace values, which
/// already contains their inner sampling noise; with a single subspace the
/// inner error is used.
fn kubota_average<F>(n: usize, j: usize, cfg: &MetricConfig, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&OrthonormalFrame, &mut Stream) -> Result<Local> + Sync,
{
    cfg.validate()?;
    let flag = flag_coefficient(n, j)?;
    let count = if j == n { 1 } else { cfg.subspace_samples };
    let locals: Vec<Local> = (0..count as u64)
        .into_par_iter()
        .map(|s| {
            let frame = if j == n {
                OrthonormalFrame::coordinate(n, n)?
            } else {
                haar_subspace(n, j, &mut substream(seed, &[s, 0]))?
            };
            f(&frame, &mut substream(seed, &[s, 1]))
        })
        .collect::<Result<_>>()?;
    let inner_samples: usize = locals.iter().map(|l| l.samples).sum();
    let estimate = if count == 1 {
        McEstimate {
            value: locals[0].value,
            std_error: locals[0].variance.sqrt(),
            samples: inner_samples,
        }
    } else {
        let acc: Accumulator = locals.iter().map(|l| l.value).collect();
        McEstimate {
            value: acc.mean(),
            std_error: acc.std_error(),
            samples: inner_samples,
        }
    };
    Ok(estimate.scaled(flag))
}

/// Closed-form intrinsic volume of balls and of polytopes whose affine
/// dimension makes the answer elementary.
fn exact_intrinsic_volume(k: &ConvexBody, j: usize) -> Result<Option<f64>> {
    match k {
        ConvexBody::Ball { radius, span, .. } => {
            let dim = span.as_ref().map_or(k.dim(), |b| b.ncols());
            if j > dim {
                return Ok(Some(0.0));
            }
            Ok(Some(radius.powi(j as i32) * flag_coefficient(dim, j)? * ball_volume(j)))
        }
        ConvexBody::Polytope { vertices } => {
            let d = affine_dimension(vertices);
            if d < j {
                return Ok(Some(0.0));
            }
            if d == j && j <= 2 {
                return Ok(Some(own_volume(vertices, j)));
            }
            Ok(None)
        }
    }
}

/// `j`-volume of a point set whose affine hull has dimension `j ≤ 2`.
fn own_volume(vertices: &[Vector], j: usize) -> f64 {
    let c = vertices.iter().fold(Vector::zeros(vertices[0].len()), |a, v| a + v) / vertices.len() as f64;
    let centered = nalgebra::DMatrix::from_columns(&vertices.iter().map(|v| v - &c).collect::<Vec<_>>());
    let svd = centered.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    // Columns of `u` come sorted by decreasing singular value.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coords: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| order[..j].iter().map(|&i| u.column(i).dot(&(v - &c))).collect())
        .collect();
    if j == 1 {
        let (lo, hi) = coords
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[0]), hi.max(x[0])));
        hi - lo
    } else {
        let pts: Vec<Point2> = coords.iter().map(|x| Point2::new(x[0], x[1])).collect();
        polygon_area(&convex_hull(&pts))
    }
}

/// `V_j(K)` by Kubota's formula.
///
/// Balls and polytopes of affine dimension below `j` (or equal to `j ≤ 2`)
/// are answered exactly with zero standard error.
pub fn intrinsic_volume<R: Rng + ?Sized>(
    k: &ConvexBody,
    j: usize,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = k.dim();
    check_j(n, j)?;
    let seed = fork_seed(rng);
    if let Some(v) = exact_intrinsic_volume(k, j)? {
        return Ok(McEstimate::exact(v));
    }
    kubota_average(n, j, cfg, seed, |frame, inner| {
        shadow_volume(&k.shadow(frame)?, cfg, inner)
    })
}

/// Volume of the hull of `points` in their own space: exact up to the
/// plane, by radial sampling from the vertex centroid above that.
pub fn hull_volume<R: Rng + ?Sized>(points: Vec<Vector>, cfg: &MetricConfig, rng: &mut R) -> Result<McEstimate> {
    if points.is_empty() {
        return Err(Error::param("hull of an empty point set"));
    }
    let local = shadow_volume(&Shadow::Polytope(points), cfg, rng)?;
    Ok(McEstimate {
        value: local.value,
        std_error: local.variance.sqrt(),
        samples: local.samples,
    })
}

/// Whether two full balls are nested, so every projection pair is nested.
fn nested_balls(k: &ConvexBody, l: &ConvexBody) -> Option<(f64, f64)> {
    let (c1, r1) = k.as_round_ball()?;
    let (c2, r2) = l.as_round_ball()?;
    ((c1 - c2).norm() + r1.min(r2) <= r1.max(r2)).then_some((r1, r2))
}

/// The `j`-th intrinsic volume metric `δ_j(K, L)`: flag coefficient times
/// the Haar average of `vol_j((K|H) △ (L|H))`.
pub fn delta_j<R: Rng + ?Sized>(
    k: &ConvexBody,
    l: &ConvexBody,
    j: usize,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = check_pair(k, l, j)?;
    let seed = fork_seed(rng);
    if k == l {
        return Ok(McEstimate::exact(0.0));
    }
    if let Some((r1, r2)) = nested_balls(k, l) {
        let per_subspace = ball_symdiff(j, &Vector::zeros(j), r1, &Vector::zeros(j), r2)?;
        return Ok(McEstimate::exact(flag_coefficient(n, j)? * per_subspace));
    }
    kubota_average(n, j, cfg, seed, |frame, inner| {
        symdiff_volume(&k.shadow(frame)?, &l.shadow(frame)?, cfg, inner)
    })
}

/// `δ_1` through support functions: `2⟨n over 1⟩ E_u |h_K(u) − h_L(u)|` with
/// `u` uniform on the sphere, one direction per configured subspace sample.
///
/// Valid for intersecting bodies only; the caller is responsible for that.
pub fn delta_1_support<R: Rng + ?Sized>(
    k: &ConvexBody,
    l: &ConvexBody,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = check_pair(k, l, 1)?;
    cfg.validate()?;
    let seed = fork_seed(rng);
    if k == l {
        return Ok(McEstimate::exact(0.0));
    }
    let mut dirs = substream(seed, &[0]);
    let acc: Accumulator = (0..cfg.subspace_samples)
        .map(|_| {
            let u = crate::beta::sample_sphere(n, &mut dirs);
            (k.support(&u) - l.support(&u)).abs()
        })
        .collect();
    Ok(acc.estimate().scaled(2.0 * flag_coefficient(n, 1)?))
}

/// Result of an intrinsic volume deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub estimate: McEstimate,
    /// Set when the two polytopes do not meet, so `V_j(P ∩ Q)` was taken as 0.
    pub empty_intersection: bool,
}

fn polytope_pair<'a>(p: &'a ConvexBody, q: &'a ConvexBody) -> Result<(&'a [Vector], &'a [Vector])> {
    match (p.vertices(), q.vertices()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::param("deviations are only supported for polytope pairs and nested balls")),
    }
}

/// The intrinsic volume deviation `Δ_j(P, Q) = V_j(P) + V_j(Q) − 2V_j(P ∩ Q)`.
///
/// Projections of `P ∩ Q` are handled by a joint LP in the convex weights of
/// both vertex sets. All three terms share subspaces and directions.
pub fn deviation_delta_j<R: Rng + ?Sized>(
    p: &ConvexBody,
    q: &ConvexBody,
    j: usize,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<Deviation> {
    let n = check_pair(p, q, j)?;
    let seed = fork_seed(rng);
    if let Some((r1, r2)) = nested_balls(p, q) {
        let v = flag_coefficient(n, j)? * ball_volume(j) * (r1.powi(j as i32) - r2.powi(j as i32)).abs();
        return Ok(Deviation {
            estimate: McEstimate::exact(v),
            empty_intersection: false,
        });
    }
    if p == q {
        return Ok(Deviation {
            estimate: McEstimate::exact(0.0),
            empty_intersection: false,
        });
    }
    let (a, b) = polytope_pair(p, q)?;
    let geometry = PairGeometry::new(a, b)?;
    let estimate = kubota_average(n, j, cfg, seed, |frame, inner| geometry.deviation(frame, cfg, inner))?;
    Ok(Deviation {
        estimate,
        empty_intersection: geometry.common.is_none(),
    })
}

/// The Florian deviation `ρ_j(P, Q) = 2V_j([P, Q]) − V_j(P) − V_j(Q)`, with
/// `[P, Q]` the convex hull of both vertex sets.
pub fn deviation_rho_j<R: Rng + ?Sized>(
    p: &ConvexBody,
    q: &ConvexBody,
    j: usize,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<McEstimate> {
    let n = check_pair(p, q, j)?;
    let seed = fork_seed(rng);
    if let Some((r1, r2)) = nested_balls(p, q) {
        let v = flag_coefficient(n, j)? * ball_volume(j) * (r1.powi(j as i32) - r2.powi(j as i32)).abs();
        return Ok(McEstimate::exact(v));
    }
    if p == q {
        return Ok(McEstimate::exact(0.0));
    }
    let (a, b) = polytope_pair(p, q)?;
    let union: Vec<Vector> = a.iter().chain(b).cloned().collect();
    let hull = ConvexBody::polytope(union)?;
    kubota_average(n, j, cfg, seed, |frame, inner| {
        let sp = p.shadow(frame)?;
        let sq = q.shadow(frame)?;
        let su = hull.shadow(frame)?;
        if j == 1 || (j == 2 && cfg.exact_low_dim) {
            let v = |s: &Shadow, r: &mut Stream| shadow_volume(s, cfg, r).map(|l| l.value);
            return Ok(Local::exact(2.0 * v(&su, inner)? - v(&sp, inner)? - v(&sq, inner)?));
        }
        // The union hull contains both, so a point of P serves all three
        // when it also lies in Q; otherwise each body keeps its own center.
        let from = sp.reference_point();
        if sq.contains(&from, cfg.tol)? {
            radial_volume(&[&su, &sp, &sq], &from, &[2.0, -1.0, -1.0], cfg.volume_samples, inner)
        } else {
            let mut shared = inner.clone();
            let u = radial_volume(&[&su], &su.reference_point(), &[2.0], cfg.volume_samples, &mut shared)?;
            let mut shared = inner.clone();
            let a = radial_volume(&[&sp], &sp.reference_point(), &[1.0], cfg.volume_samples, &mut shared)?;
            let b = radial_volume(&[&sq], &sq.reference_point(), &[1.0], cfg.volume_samples, inner)?;
            Ok(Local {
                value: u.value - a.value - b.value,
                variance: u.variance + a.variance + b.variance,
                samples: u.samples,
            })
        }
    })
}

/// Zero-pads `body` into `R^{n+extra}`.
pub fn embed(body: &ConvexBody, extra: usize) -> ConvexBody {
    body.embed(extra)
}
