//! Deterministic geometric primitives.
//!
//! Frames and projections, convex-hull membership by linear programming,
//! simplex volumes, and exact planar polygon/disk areas.

pub mod body;
pub mod lp;
pub mod planar;

pub use body::ConvexBody;
pub use lp::{hull_membership, LpOutcome};
pub use planar::disk_polygon_symdiff;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// A point or direction in `R^n`.
pub type Vector = DVector<f64>;

/// Tolerance used to accept a basis as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// `j` orthonormal columns in `R^n`, representing a point of `Gr(n, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    basis: DMatrix<f64>,
}

impl OrthonormalFrame {
    /// Wraps `basis` (an `n × j` matrix) after checking orthonormality.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (n, j) = basis.shape();
        if j == 0 || j > n {
            return Err(Error::param(format!("frame must have 1 ≤ j ≤ n, got n={n}, j={j}")));
        }
        let gram = basis.transpose() * &basis;
        let dev = (gram - DMatrix::<f64>::identity(j, j)).amax();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::param(format!(
                "columns are not orthonormal (max Gram deviation {dev:.3e})"
            )));
        }
        Ok(OrthonormalFrame { basis })
    }

    /// The first `j` standard basis vectors of `R^n`.
    pub fn coordinate(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::param(format!("frame must have 1 ≤ j ≤ n, got n={n}, j={j}")));
        }
        Ok(OrthonormalFrame {
            basis: DMatrix::identity(n, j),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn column(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    /// Gram matrix of the columns.
    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    /// Left-multiplies the basis by an orthogonal matrix.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Result<Self> {
        check_orthogonal(rotation, self.ambient_dim())?;
        Ok(OrthonormalFrame {
            basis: rotation * &self.basis,
        })
    }

    /// Projection factor `cos Θ = |det(AᵀB)|` between two frames of equal dimension.
    pub fn projection_factor(&self, other: &OrthonormalFrame) -> Result<f64> {
        if self.dim() != other.dim() || self.ambient_dim() != other.ambient_dim() {
            return Err(Error::param("projection factor needs frames of equal shape"));
        }
        Ok((self.basis.transpose() * &other.basis).determinant().abs())
    }
}

/// Checks that `m` is an `n × n` orthogonal matrix within [`ORTHONORMAL_TOL`].
pub fn check_orthogonal(m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::param(format!(
            "rotation must be {n}×{n}, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = (m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax();
    if dev > ORTHONORMAL_TOL {
        return Err(Error::param(format!(
            "matrix is not orthogonal (max deviation {dev:.3e})"
        )));
    }
    Ok(())
}

/// Fills a vector with independent standard Gaussians.
pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Samples a subspace from the Haar probability measure on `Gr(n, j)`.
///
/// Orthonormalizes `j` independent standard Gaussian vectors (modified
/// Gram–Schmidt, applied twice). Rotation invariance of the Gaussian makes the
/// span exactly Haar distributed.
pub fn haar_subspace<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Result<OrthonormalFrame> {
    if j == 0 || j > n {
        return Err(Error::param(format!("haar_subspace needs 1 ≤ j ≤ n, got n={n}, j={j}")));
    }
    let mut basis = DMatrix::<f64>::zeros(n, j);
    let mut k = 0;
    while k < j {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for i in 0..k {
                let c = basis.column(i);
                let d = c.dot(&v);
                v.axpy(-d, &c, 1.0);
            }
        }
        let norm = v.norm();
        // A nearly dependent draw is discarded rather than renormalized.
        if norm < 1e-8 {
            continue;
        }
        basis.set_column(k, &(v / norm));
        k += 1;
    }
    Ok(OrthonormalFrame { basis })
}

/// Coordinates of the orthogonal projection of `x` onto the span of `frame`.
pub fn project(x: &Vector, frame: &OrthonormalFrame) -> Result<Vector> {
    if x.len() != frame.ambient_dim() {
        return Err(Error::param(format!(
            "cannot project a {}-vector through a frame in R^{}",
            x.len(),
            frame.ambient_dim()
        )));
    }
    Ok(frame.basis.tr_mul(x))
}

/// Projects every point; dimensions are assumed consistent.
pub(crate) fn project_all(points: &[Vector], frame: &OrthonormalFrame) -> Vec<Vector> {
    points.iter().map(|p| frame.basis.tr_mul(p)).collect()
}

/// `m`-dimensional volume of the simplex spanned by `m + 1` points in `R^n`,
/// `sqrt(det(GᵀG)) / m!` with `G` the edge matrix.
pub fn simplex_volume(points: &[Vector]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::param("simplex needs at least one point"));
    }
    let n = points[0].len();
    let m = points.len() - 1;
    if m > n {
        return Err(Error::param(format!(
            "{} points cannot span a simplex in R^{n}",
            points.len()
        )));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::param("simplex points have mixed dimensions"));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let edges = DMatrix::from_fn(n, m, |r, c| points[c + 1][r] - points[0][r]);
    let det = (edges.transpose() * &edges).determinant();
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    Ok(det.max(0.0).sqrt() / factorial)
}

/// Dimension of the affine hull of `points` (numerical rank of the centered
/// point matrix at relative tolerance `1e-10`).
pub fn affine_dimension(points: &[Vector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let m = points.len() - 1;
    let edges = DMatrix::from_fn(n, m, |r, c| points[c + 1][r] - points[0][r]);
    let sv = edges.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn haar_frames_are_orthonormal() {
        let mut rng = stream(3);
        for &(n, j) in &[(3, 1), (3, 3), (5, 2), (8, 8), (12, 4)] {
            let f = haar_subspace(n, j, &mut rng).unwrap();
            let dev = (f.gram() - DMatrix::<f64>::identity(j, j)).amax();
            assert!(dev < 1e-10, "n={n} j={j} dev={dev}");
        }
    }

    #[test]
    fn haar_rejects_bad_dimensions() {
        let mut rng = stream(0);
        assert!(haar_subspace(3, 4, &mut rng).is_err());
        assert!(haar_subspace(3, 0, &mut rng).is_err());
    }

    #[test]
    fn full_dimensional_projection_is_an_isometry() {
        let mut rng = stream(11);
        let f = haar_subspace(3, 3, &mut rng).unwrap();
        let x = Vector::from_vec(vec![0.3, -1.2, 2.0]);
        assert!(close(project(&x, &f).unwrap().norm(), x.norm(), 1e-12));
    }

    #[test]
    fn line_angle_has_mean_cos_squared_one_half() {
        // (n, j) = (2, 1): the angle of the line is uniform, E cos²θ = 1/2.
        let mut rng = stream(2024);
        let m = 100_000;
        let mean = (0..m)
            .map(|_| haar_subspace(2, 1, &mut rng).unwrap().basis()[(0, 0)].powi(2))
            .sum::<f64>()
            / m as f64;
        assert!(close(mean, 0.5, 0.01), "{mean}");
    }

    #[test]
    fn projection_examples() {
        let e1 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let f = OrthonormalFrame::coordinate(3, 1).unwrap();
        assert_eq!(project(&e1, &f).unwrap(), Vector::from_vec(vec![1.0]));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = OrthonormalFrame::new(DMatrix::from_column_slice(2, 1, &[h, h])).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        assert!(close(project(&x, &f).unwrap()[0], 2f64.sqrt(), 1e-15));

        let f = OrthonormalFrame::coordinate(4, 4).unwrap();
        let x = Vector::from_vec(vec![1.0, -2.0, 3.0, 0.5]);
        assert_eq!(project(&x, &f).unwrap(), x);

        assert!(project(&Vector::zeros(2), &OrthonormalFrame::coordinate(3, 1).unwrap()).is_err());
    }

    #[test]
    fn non_orthonormal_basis_is_rejected() {
        let m = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.1, 1.0]);
        assert!(OrthonormalFrame::new(m).is_err());
    }

    #[test]
    fn simplex_volume_examples() {
        let v = |c: &[f64]| Vector::from_vec(c.to_vec());
        let tri = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(close(simplex_volume(&tri).unwrap(), 0.5, 1e-15));
        let col = [v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        assert!(simplex_volume(&col).unwrap() < 1e-7);
        let seg = [v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 1.0])];
        assert!(close(simplex_volume(&seg).unwrap(), 3f64.sqrt(), 1e-15));
        let too_many = [v(&[0.0]), v(&[1.0]), v(&[2.0])];
        assert!(simplex_volume(&too_many).is_err());
    }

    #[test]
    fn projection_factor_of_coordinate_frames() {
        let a = OrthonormalFrame::coordinate(3, 2).unwrap();
        assert!(close(a.projection_factor(&a).unwrap(), 1.0, 1e-15));
        let b = OrthonormalFrame::new(DMatrix::from_column_slice(
            3,
            2,
            &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        ))
        .unwrap();
        assert!(close(a.projection_factor(&b).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn affine_dimension_counts_flat_sets() {
        let v = |c: &[f64]| Vector::from_vec(c.to_vec());
        assert_eq!(affine_dimension(&[v(&[1.0, 2.0, 3.0])]), 0);
        assert_eq!(affine_dimension(&[v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0]), v(&[2.0, 2.0, 0.0])]), 1);
        assert_eq!(
            affine_dimension(&[v(&[0.0, 0.0, 0.0]), v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])]),
            3
        );
    }
}
