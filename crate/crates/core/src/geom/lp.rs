//! Dense two-phase simplex for the small feasibility problems behind hull
//! membership, radial functions and intersection projections.
//!
//! Problems are in standard form `min cᵀx  s.t.  Ax = b, x ≥ 0` with a few
//! rows (the ambient dimension plus one or two) and up to a few thousand
//! columns. Bland's rule is used throughout so degenerate vertices never
//! cycle.

use super::Vector;
use crate::error::{Error, Result};

/// Pivot and feasibility tolerance.
pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    /// Phase I ended with a positive sum of infeasibilities.
    Infeasible { residual: f64 },
    Unbounded,
}

/// `min cᵀx  s.t.  Ax = b, x ≥ 0`, with `A` stored row-major.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl LinearProgram {
    pub fn new(rows: usize, cols: usize) -> Self {
        LinearProgram {
            rows,
            cols,
            a: vec![0.0; rows * cols],
            b: vec![0.0; rows],
            c: vec![0.0; cols],
        }
    }

    pub fn set_a(&mut self, row: usize, col: usize, v: f64) {
        self.a[row * self.cols + col] = v;
    }

    pub fn set_b(&mut self, row: usize, v: f64) {
        self.b[row] = v;
    }

    pub fn set_c(&mut self, col: usize, v: f64) {
        self.c[col] = v;
    }

    /// Runs phase I only; returns the minimal sum of infeasibilities.
    pub fn infeasibility(&self, tol: f64) -> Result<f64> {
        let mut t = Tableau::new(self);
        t.phase_one(tol)?;
        Ok(t.objective_value().max(0.0))
    }

    pub fn solve(&self, tol: f64) -> Result<LpOutcome> {
        let mut t = Tableau::new(self);
        t.phase_one(tol)?;
        let residual = t.objective_value();
        if residual > tol.max(1e-12) * (1.0 + t.rhs_scale) {
            return Ok(LpOutcome::Infeasible { residual });
        }
        t.expel_artificials(tol);
        if !t.phase_two(&self.c, tol)? {
            return Ok(LpOutcome::Unbounded);
        }
        let x = t.solution();
        let value = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { value, x })
    }
}

struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    // m constraint rows followed by one objective row; each row has
    // n structural columns, m artificial columns and the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
    max_iterations: usize,
    iterations: usize,
    rhs_scale: f64,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let (m, n) = (lp.rows, lp.cols);
        let width = n + m + 1;
        let mut data = vec![0.0; (m + 1) * width];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = sign * lp.a[i * n + j];
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * lp.b[i];
        }
        // Phase I objective: minimize the sum of artificials. Reduced costs
        // of structural columns are minus the column sums.
        for i in 0..m {
            for j in 0..n {
                data[m * width + j] -= data[i * width + j];
            }
            data[m * width + width - 1] -= data[i * width + width - 1];
        }
        let rhs_scale = lp.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Tableau {
            m,
            n,
            width,
            data,
            basis: (n..n + m).collect(),
            max_iterations: 100 * (m + n) + 1000,
            iterations: 0,
            rhs_scale,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    /// Current objective value (phase I: sum of artificials).
    fn objective_value(&self) -> f64 {
        -self.at(self.m, self.width - 1)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (head, tail) = self.data.split_at_mut(r * w);
        let (prow, rest) = tail.split_at_mut(w);
        for row in head.chunks_exact_mut(w).chain(rest.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations over the first `allowed` columns.
    /// Returns false when the objective is unbounded below.
    fn iterate(&mut self, allowed: usize, tol: f64) -> Result<bool> {
        loop {
            let obj = self.m;
            let Some(c) = (0..allowed).find(|&j| self.at(obj, j) < -tol) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > tol {
                    let ratio = self.at(i, self.width - 1) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, c);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::numerical(
                    "simplex",
                    format!(
                        "iteration cap {} exceeded ({} rows, {} columns, objective {:.3e})",
                        self.max_iterations,
                        self.m,
                        self.n,
                        self.objective_value()
                    ),
                ));
            }
        }
    }

    fn phase_one(&mut self, tol: f64) -> Result<()> {
        self.iterate(self.n, tol).map(|_| ())
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self, tol: f64) {
        for r in 0..self.m {
            if self.basis[r] >= self.n {
                if let Some(c) = (0..self.n).find(|&j| self.at(r, j).abs() > tol) {
                    self.pivot(r, c);
                }
            }
        }
    }

    fn phase_two(&mut self, c: &[f64], tol: f64) -> Result<bool> {
        let (m, w) = (self.m, self.width);
        let mut obj = vec![0.0; w];
        obj[..self.n].copy_from_slice(c);
        for i in 0..m {
            let b = self.basis[i];
            let cb = if b < self.n { c[b] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..w {
                    obj[j] -= cb * self.at(i, j);
                }
            }
        }
        self.data[m * w..(m + 1) * w].copy_from_slice(&obj);
        self.iterate(self.n, tol)
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.at(i, self.width - 1).max(0.0);
            }
        }
        x
    }
}

fn check_points(x_dim: usize, pts: &[Vector]) -> Result<()> {
    if pts.is_empty() {
        return Err(Error::param("point set is empty"));
    }
    if pts.iter().any(|p| p.len() != x_dim) {
        return Err(Error::param("points and query have different dimensions"));
    }
    Ok(())
}

/// Whether `x` lies within `tol` of `conv(pts)`.
///
/// Decided by phase-I feasibility of `Σλᵢpᵢ = x, Σλᵢ = 1, λ ≥ 0`; the
/// residual compared against `tol` is the L1 norm of the constraint
/// violation.
pub fn hull_membership(x: &Vector, pts: &[Vector], tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::param("hull_membership tolerance must be positive"));
    }
    let d = x.len();
    check_points(d, pts)?;
    // Bounding-box rejection settles most far-away queries without an LP.
    for k in 0..d {
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
        if x[k] < lo - tol || x[k] > hi + tol {
            return Ok(false);
        }
    }
    let mut lp = LinearProgram::new(d + 1, pts.len());
    for (j, p) in pts.iter().enumerate() {
        for k in 0..d {
            lp.set_a(k, j, p[k]);
        }
        lp.set_a(d, j, 1.0);
    }
    for k in 0..d {
        lp.set_b(k, x[k]);
    }
    lp.set_b(d, 1.0);
    Ok(lp.infeasibility(LP_TOL)? <= tol)
}

/// Radial function of `conv(pts)` seen from `center` in direction `dir`:
/// the largest `s ≥ 0` with `center + s·dir ∈ conv(pts)`.
///
/// Solved as the gauge problem `min Σμᵢ  s.t.  Σμᵢ(pᵢ − center) = dir, μ ≥ 0`,
/// whose optimum is `1/s`. Directions outside the cone of the translated
/// points (only possible when `center` is on the boundary) give `0`.
pub fn radial_function(center: &Vector, dir: &Vector, pts: &[Vector]) -> Result<f64> {
    let d = center.len();
    check_points(d, pts)?;
    if dir.len() != d {
        return Err(Error::param("direction has the wrong dimension"));
    }
    let mut lp = LinearProgram::new(d, pts.len());
    for (j, p) in pts.iter().enumerate() {
        for k in 0..d {
            lp.set_a(k, j, p[k] - center[k]);
        }
        lp.set_c(j, 1.0);
    }
    for k in 0..d {
        lp.set_b(k, dir[k]);
    }
    match lp.solve(LP_TOL)? {
        LpOutcome::Optimal { value, .. } if value > 0.0 => Ok(1.0 / value),
        LpOutcome::Optimal { .. } | LpOutcome::Unbounded => Err(Error::numerical(
            "radial function",
            "gauge problem has no positive optimum; is the point set degenerate?",
        )),
        LpOutcome::Infeasible { .. } => Ok(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::planar::{convex_hull, point_in_convex_polygon};
    use crate::rng::stream;
    use nalgebra::Vector2;
    use rand::Rng;

    fn v(c: &[f64]) -> Vector {
        Vector::from_vec(c.to_vec())
    }

    fn square() -> Vec<Vector> {
        vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0]), v(&[1.0, -1.0])]
    }

    #[test]
    fn centroid_is_inside() {
        let pts = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 2.0, 0.0]), v(&[0.0, 0.0, 3.0])];
        let c = pts.iter().fold(Vector::zeros(3), |a, p| a + p) / 4.0;
        assert!(hull_membership(&c, &pts, 1e-9).unwrap());
    }

    #[test]
    fn separated_point_is_outside() {
        let pts = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.5, 0.0]), v(&[0.2, 2.0, 0.7])];
        assert!(!hull_membership(&v(&[2.0, 0.5, 0.1]), &pts, 1e-9).unwrap());
    }

    #[test]
    fn square_boundary_cases() {
        assert!(hull_membership(&v(&[0.999, 0.0]), &square(), 1e-9).unwrap());
        assert!(!hull_membership(&v(&[1.001, 0.0]), &square(), 1e-9).unwrap());
        // Strictly inside the bounding box but outside the triangle.
        let tri = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(!hull_membership(&v(&[0.6, 0.6]), &tri, 1e-9).unwrap());
        assert!(hull_membership(&v(&[0.4, 0.4]), &tri, 1e-9).unwrap());
    }

    #[test]
    fn membership_errors() {
        assert!(hull_membership(&v(&[0.0]), &[], 1e-9).is_err());
        assert!(hull_membership(&v(&[0.0]), &[v(&[1.0])], 0.0).is_err());
        assert!(hull_membership(&v(&[0.0, 0.0]), &[v(&[1.0])], 1e-9).is_err());
    }

    #[test]
    fn agrees_with_planar_point_in_polygon() {
        let mut rng = stream(99);
        let mut checked = 0;
        while checked < 10_000 {
            let k = rng.random_range(3..12);
            let pts: Vec<Vector> = (0..k)
                .map(|_| v(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]))
                .collect();
            let hull = convex_hull(&pts.iter().map(|p| Vector2::new(p[0], p[1])).collect::<Vec<_>>());
            for _ in 0..20 {
                let q = Vector2::new(rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2));
                let dist = hull_boundary_distance(&hull, q);
                if dist < 1e-6 {
                    continue;
                }
                let lp = hull_membership(&v(&[q.x, q.y]), &pts, 1e-9).unwrap();
                assert_eq!(lp, point_in_convex_polygon(&hull, q, 0.0), "query {q:?}");
                checked += 1;
            }
        }
    }

    fn hull_boundary_distance(hull: &[Vector2<f64>], q: Vector2<f64>) -> f64 {
        let k = hull.len();
        (0..k)
            .map(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % k]);
                let ab = b - a;
                let t = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                (a + ab * t - q).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn radial_function_of_square() {
        let o = v(&[0.0, 0.0]);
        assert!((radial_function(&o, &v(&[1.0, 0.0]), &square()).unwrap() - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = radial_function(&o, &v(&[h, h]), &square()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        // From a boundary point, outward directions have zero radius.
        let edge = v(&[1.0, 0.0]);
        assert_eq!(radial_function(&edge, &v(&[1.0, 0.0]), &square()).unwrap(), 0.0);
    }

    #[test]
    fn solves_a_textbook_program() {
        // min −x − y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6  → (1.6, 1.2)
        let mut lp = LinearProgram::new(2, 4);
        for (j, a) in [1.0, 2.0, 1.0, 0.0].iter().enumerate() {
            lp.set_a(0, j, *a);
        }
        for (j, a) in [3.0, 1.0, 0.0, 1.0].iter().enumerate() {
            lp.set_a(1, j, *a);
        }
        lp.set_b(0, 4.0);
        lp.set_b(1, 6.0);
        lp.set_c(0, -1.0);
        lp.set_c(1, -1.0);
        match lp.solve(LP_TOL).unwrap() {
            LpOutcome::Optimal { value, x } => {
                assert!((value + 2.8).abs() < 1e-12);
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_unbounded_and_infeasible() {
        // min −x s.t. x − y = 1
        let mut lp = LinearProgram::new(1, 2);
        lp.set_a(0, 0, 1.0);
        lp.set_a(0, 1, -1.0);
        lp.set_b(0, 1.0);
        lp.set_c(0, -1.0);
        assert_eq!(lp.solve(LP_TOL).unwrap(), LpOutcome::Unbounded);
        // x + y = −1 with x, y ≥ 0
        let mut lp = LinearProgram::new(1, 2);
        lp.set_a(0, 0, 1.0);
        lp.set_a(0, 1, 1.0);
        lp.set_b(0, -1.0);
        assert!(matches!(lp.solve(LP_TOL).unwrap(), LpOutcome::Infeasible { .. }));
    }
}
