//! Volumes of single projections and of symmetric differences of two
//! projections, in the projection's own `j`-dimensional coordinates.

use super::MetricConfig;
use crate::beta::{cdf_f1_upper, sample_sphere};
use crate::error::{Error, Result};
use crate::geom::body::Shadow;
use crate::geom::lp::{LinearProgram, LpOutcome, LP_TOL};
use crate::geom::planar::{convex_hull, disk_polygon_symdiff, polygon_area, polygon_symdiff, Point2};
use crate::geom::{OrthonormalFrame, Vector};
use crate::special::ball_volume;
use crate::stats::Accumulator;
use nalgebra::DMatrix;
use rand::Rng;

/// One per-subspace evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Local {
    pub value: f64,
    /// Variance of `value` as an estimator (0 for exact evaluations).
    pub variance: f64,
    pub samples: usize,
}

impl Local {
    pub fn exact(value: f64) -> Self {
        Local {
            value,
            variance: 0.0,
            samples: 1,
        }
    }

    fn from_accumulator(acc: &Accumulator) -> Self {
        Local {
            value: acc.mean(),
            variance: acc.variance_of_mean(),
            samples: acc.count(),
        }
    }
}

fn planar(points: &[Vector]) -> Vec<Point2> {
    let pts: Vec<Point2> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    convex_hull(&pts)
}

fn interval(s: &Shadow) -> (f64, f64) {
    let e = Vector::from_element(1, 1.0);
    (-s.support(&-&e), s.support(&e))
}

fn is_flat(s: &Shadow) -> bool {
    matches!(s, Shadow::Ellipsoid { precision: None, .. })
}

/// `j`-volume of a shadow.
pub(crate) fn shadow_volume<R: Rng + ?Sized>(s: &Shadow, cfg: &MetricConfig, rng: &mut R) -> Result<Local> {
    if let Some(v) = s.ellipsoid_volume() {
        return Ok(Local::exact(v));
    }
    let Shadow::Polytope(pts) = s else { unreachable!() };
    match s.dim() {
        1 => {
            let (lo, hi) = interval(s);
            Ok(Local::exact(hi - lo))
        }
        2 if cfg.exact_low_dim => Ok(Local::exact(polygon_area(&planar(pts)))),
        _ => radial_volume(&[s], &s.reference_point(), &[1.0], cfg.volume_samples, rng),
    }
}

/// `κ_j E_u Σ_k w_k ρ_k(u)^j` over uniform directions `u`, all radial
/// functions taken from the common point `from`.
pub(crate) fn radial_volume<R: Rng + ?Sized>(
    shadows: &[&Shadow],
    from: &Vector,
    weights: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<Local> {
    let j = from.len();
    let kappa = ball_volume(j);
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let u = sample_sphere(j, rng);
        let mut w = 0.0;
        for (s, &c) in shadows.iter().zip(weights) {
            w += c * s.radial(from, &u)?.powi(j as i32);
        }
        acc.push(kappa * w);
    }
    Ok(Local::from_accumulator(&acc))
}

/// Volume of the symmetric difference of two round `j`-balls.
pub(crate) fn ball_symdiff(j: usize, c1: &Vector, r1: f64, c2: &Vector, r2: f64) -> Result<f64> {
    let kappa = ball_volume(j);
    let v1 = kappa * r1.powi(j as i32);
    let v2 = kappa * r2.powi(j as i32);
    let d = (c1 - c2).norm();
    if d + r1.min(r2) <= r1.max(r2) {
        return Ok((v1 - v2).abs());
    }
    if d >= r1 + r2 {
        return Ok(v1 + v2);
    }
    // The lens is cut by the radical hyperplane; each side is a cap whose
    // volume fraction is the upper tail of the coordinate marginal.
    let a1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let a2 = d - a1;
    let marginal = 0.5 * (j as f64 - 1.0);
    let lens = v1 * cdf_f1_upper(marginal, a1 / r1)? + v2 * cdf_f1_upper(marginal, a2 / r2)?;
    Ok(v1 + v2 - 2.0 * lens)
}

/// Polygon versus a full-dimensional ellipse, by mapping the ellipse to the
/// unit disk.
fn polygon_ellipse_symdiff(pts: &[Vector], center: &Vector, factor: &DMatrix<f64>) -> Result<f64> {
    let shape = factor * factor.transpose();
    let chol = shape
        .cholesky()
        .ok_or_else(|| Error::numerical("ellipse whitening", "shape matrix is not positive definite"))?;
    let l = chol.l();
    let det = l[(0, 0)] * l[(1, 1)];
    let whitened: Vec<Vector> = pts
        .iter()
        .map(|p| {
            let w = l
                .solve_lower_triangular(&(p - center))
                .expect("nonsingular triangular factor");
            Vector::from_vec(vec![w[0], w[1]])
        })
        .collect();
    Ok(det * disk_polygon_symdiff(&planar(&whitened), Point2::zeros(), 1.0)?)
}

/// Candidate common points of two shadows.
fn common_point(a: &Shadow, b: &Shadow, tol: f64) -> Result<Option<Vector>> {
    let (ra, rb) = (a.reference_point(), b.reference_point());
    let mid = (&ra + &rb) * 0.5;
    for c in [mid, ra, rb] {
        if a.contains(&c, tol)? && b.contains(&c, tol)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// `j`-volume of `A △ B` for two shadows in the same `R^j`.
pub(crate) fn symdiff_volume<R: Rng + ?Sized>(
    a: &Shadow,
    b: &Shadow,
    cfg: &MetricConfig,
    rng: &mut R,
) -> Result<Local> {
    let j = a.dim();
    if b.dim() != j {
        return Err(Error::param("shadows live in different dimensions"));
    }
    if a == b {
        return Ok(Local::exact(0.0));
    }
    if is_flat(a) {
        return shadow_volume(b, cfg, rng);
    }
    if is_flat(b) {
        return shadow_volume(a, cfg, rng);
    }
    if j == 1 {
        let (a0, a1) = interval(a);
        let (b0, b1) = interval(b);
        let overlap = (a1.min(b1) - a0.max(b0)).max(0.0);
        return Ok(Local::exact((a1 - a0) + (b1 - b0) - 2.0 * overlap));
    }
    match (a, b) {
        (
            Shadow::Ellipsoid {
                center: c1,
                round: Some(r1),
                ..
            },
            Shadow::Ellipsoid {
                center: c2,
                round: Some(r2),
                ..
            },
        ) => return Ok(Local::exact(ball_symdiff(j, c1, *r1, c2, *r2)?)),
        _ if j == 2 && cfg.exact_low_dim => {
            if let Some(v) = planar_symdiff(a, b)? {
                return Ok(Local::exact(v));
            }
        }
        _ => {}
    }
    match common_point(a, b, cfg.tol)? {
        Some(c) => radial_symdiff(a, b, &c, cfg.volume_samples, rng),
        None => xor_symdiff(a, b, cfg, rng),
    }
}

fn planar_symdiff(a: &Shadow, b: &Shadow) -> Result<Option<f64>> {
    Ok(match (a, b) {
        (Shadow::Polytope(p), Shadow::Polytope(q)) => Some(polygon_symdiff(&planar(p), &planar(q))),
        (Shadow::Polytope(p), Shadow::Ellipsoid { center, factor, round, .. })
        | (Shadow::Ellipsoid { center, factor, round, .. }, Shadow::Polytope(p)) => Some(match round {
            Some(r) => disk_polygon_symdiff(&planar(p), Point2::new(center[0], center[1]), *r)?,
            None => polygon_ellipse_symdiff(p, center, factor)?,
        }),
        _ => None,
    })
}

/// `κ_j E_u |ρ_A(u)^j − ρ_B(u)^j|` from a point of `A ∩ B`.
pub(crate) fn radial_symdiff<R: Rng + ?Sized>(
    a: &Shadow,
    b: &Shadow,
    from: &Vector,
    m: usize,
    rng: &mut R,
) -> Result<Local> {
    let j = from.len();
    let kappa = ball_volume(j);
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let u = sample_sphere(j, rng);
        let ra = a.radial(from, &u)?.powi(j as i32);
        let rb = b.radial(from, &u)?.powi(j as i32);
        acc.push(kappa * (ra - rb).abs());
    }
    Ok(Local::from_accumulator(&acc))
}

/// Hit-or-miss estimate of `vol(A △ B)` in a ball enclosing both.
fn xor_symdiff<R: Rng + ?Sized>(a: &Shadow, b: &Shadow, cfg: &MetricConfig, rng: &mut R) -> Result<Local> {
    let j = a.dim();
    let center = (a.reference_point() + b.reference_point()) * 0.5;
    let radius = 1.01 * a.reach_from(&center).max(b.reach_from(&center));
    let enclosing = ball_volume(j) * radius.powi(j as i32);
    let mut acc = Accumulator::new();
    for _ in 0..cfg.volume_samples {
        let u = sample_sphere(j, rng);
        let s = rng.random::<f64>().powf(1.0 / j as f64) * radius;
        let z = &center + u * s;
        let hit = a.contains(&z, cfg.tol)? != b.contains(&z, cfg.tol)?;
        acc.push(if hit { enclosing } else { 0.0 });
    }
    Ok(Local::from_accumulator(&acc))
}

/// Joint LP data for `P ∩ Q`: columns are the vertices of `P` (weights λ)
/// followed by those of `Q` (weights μ); the first `n` rows force
/// `Σλp = Σμq` and the last two make both weight vectors convex.
struct Intersection<'a> {
    p: &'a [Vector],
    q: &'a [Vector],
}

impl<'a> Intersection<'a> {
    fn n(&self) -> usize {
        self.p[0].len()
    }

    fn base(&self, extra_rows: usize, extra_cols: usize) -> LinearProgram {
        let n = self.n();
        let (np, nq) = (self.p.len(), self.q.len());
        let mut lp = LinearProgram::new(n + 2 + extra_rows, np + nq + extra_cols);
        for (i, v) in self.p.iter().enumerate() {
            for k in 0..n {
                lp.set_a(k, i, v[k]);
            }
            lp.set_a(n, i, 1.0);
        }
        for (i, w) in self.q.iter().enumerate() {
            for k in 0..n {
                lp.set_a(k, np + i, -w[k]);
            }
            lp.set_a(n + 1, np + i, 1.0);
        }
        lp.set_b(n, 1.0);
        lp.set_b(n + 1, 1.0);
        lp
    }

    /// Minimizer of `⟨x, dir⟩` over `P ∩ Q`, or `None` when it is empty.
    fn extreme(&self, dir: &Vector) -> Result<Option<(f64, Vector)>> {
        let mut lp = self.base(0, 0);
        for (i, v) in self.p.iter().enumerate() {
            lp.set_c(i, v.dot(dir));
        }
        match lp.solve(LP_TOL)? {
            LpOutcome::Optimal { value, x } => {
                let point = self
                    .p
                    .iter()
                    .zip(&x)
                    .fold(Vector::zeros(self.n()), |acc, (v, &l)| acc + v * l);
                Ok(Some((value, point)))
            }
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded => Err(Error::numerical("intersection LP", "bounded problem reported unbounded")),
        }
    }

    /// A relative-interior point of `P ∩ Q`: the mean of its extreme points
    /// in the coordinate directions.
    fn inner_point(&self) -> Result<Option<Vector>> {
        let n = self.n();
        let mut sum = Vector::zeros(n);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut e = Vector::zeros(n);
                e[k] = sign;
                match self.extreme(&e)? {
                    Some((_, x)) => sum += x,
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(sum / (2 * n) as f64))
    }

    /// Largest `r ≥ 0` with `from + r·u ∈ (P ∩ Q)|H`.
    fn radial(&self, frame: &OrthonormalFrame, from: &Vector, u: &Vector) -> Result<f64> {
        let n = self.n();
        let j = frame.dim();
        let np = self.p.len();
        let r_col = np + self.q.len();
        let mut lp = self.base(j, 1);
        let basis = frame.basis();
        for (i, v) in self.p.iter().enumerate() {
            let pv = basis.tr_mul(v);
            for k in 0..j {
                lp.set_a(n + 2 + k, i, pv[k]);
            }
        }
        for k in 0..j {
            lp.set_a(n + 2 + k, r_col, -u[k]);
            lp.set_b(n + 2 + k, from[k]);
        }
        lp.set_c(r_col, -1.0);
        match lp.solve(LP_TOL)? {
            LpOutcome::Optimal { value, .. } => Ok((-value).max(0.0)),
            LpOutcome::Infeasible { .. } => Ok(0.0),
            LpOutcome::Unbounded => Err(Error::numerical("intersection LP", "bounded problem reported unbounded")),
        }
    }
}

/// Per-subspace pieces shared by the deviation estimators.
pub(crate) struct PairGeometry<'a> {
    inter: Intersection<'a>,
    /// A point of `P ∩ Q`, when nonempty.
    pub common: Option<Vector>,
}

impl<'a> PairGeometry<'a> {
    pub fn new(p: &'a [Vector], q: &'a [Vector]) -> Result<Self> {
        let inter = Intersection { p, q };
        let common = inter.inner_point()?;
        Ok(PairGeometry { inter, common })
    }

    /// `vol_j(P|H) + vol_j(Q|H) − 2 vol_j((P ∩ Q)|H)`.
    pub fn deviation<R: Rng + ?Sized>(
        &self,
        frame: &OrthonormalFrame,
        cfg: &MetricConfig,
        rng: &mut R,
    ) -> Result<Local> {
        let sp = Shadow::Polytope(crate::geom::project_all(self.inter.p, frame));
        let sq = Shadow::Polytope(crate::geom::project_all(self.inter.q, frame));
        let Some(x0) = &self.common else {
            let a = shadow_volume(&sp, cfg, rng)?;
            let b = shadow_volume(&sq, cfg, rng)?;
            return Ok(Local {
                value: a.value + b.value,
                variance: a.variance + b.variance,
                samples: a.samples.max(b.samples),
            });
        };
        let j = frame.dim();
        if j == 1 {
            let f = frame.column(0);
            let lo = self.inter.extreme(&f)?.map(|(v, _)| v).unwrap_or(0.0);
            let hi = self.inter.extreme(&-&f)?.map(|(v, _)| -v).unwrap_or(0.0);
            let a = shadow_volume(&sp, cfg, rng)?.value;
            let b = shadow_volume(&sq, cfg, rng)?.value;
            return Ok(Local::exact(a + b - 2.0 * (hi - lo).max(0.0)));
        }
        let from = frame.basis().tr_mul(x0);
        let kappa = ball_volume(j);
        let mut acc = Accumulator::new();
        for _ in 0..cfg.volume_samples {
            let u = sample_sphere(j, rng);
            let a = sp.radial(&from, &u)?;
            let b = sq.radial(&from, &u)?;
            let i = self.inter.radial(frame, &from, &u)?.min(a).min(b);
            let jj = j as i32;
            acc.push(kappa * (a.powi(jj) + b.powi(jj) - 2.0 * i.powi(jj)));
        }
        Ok(Local::from_accumulator(&acc))
    }
}
