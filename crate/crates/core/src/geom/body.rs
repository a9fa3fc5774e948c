//! Convex bodies (V-polytopes and balls) and their orthogonal projections.

use super::lp::{hull_membership, radial_function};
use super::{check_orthogonal, project_all, OrthonormalFrame, Vector};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// A convex body in `R^n`.
///
/// Rigid motions and scalings are applied eagerly: a transformed polytope is
/// a polytope with transformed vertices, a transformed ball a ball with a
/// moved center. Balls produced by [`ConvexBody::embed`] are flat: they keep
/// an orthonormal basis of the directions they extend in.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Polytope {
        vertices: Vec<Vector>,
    },
    Ball {
        center: Vector,
        radius: f64,
        /// `n × k` orthonormal basis of the affine span; `None` for a full ball.
        span: Option<DMatrix<f64>>,
    },
}

impl ConvexBody {
    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::param("a polytope needs at least one vertex"));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::param("vertices must have positive dimension"));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::param("polytope vertices have mixed dimensions"));
        }
        if vertices.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::param("polytope vertices must be finite"));
        }
        Ok(ConvexBody::Polytope { vertices })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(format!("ball radius must be positive, got {radius}")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("ball center must be a finite nonempty vector"));
        }
        Ok(ConvexBody::Ball {
            center,
            radius,
            span: None,
        })
    }

    /// The centered ball `r·B_n`.
    pub fn centered_ball(n: usize, radius: f64) -> Result<Self> {
        Self::ball(Vector::zeros(n), radius)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope { vertices } => vertices[0].len(),
            ConvexBody::Ball { center, .. } => center.len(),
        }
    }

    pub fn vertices(&self) -> Option<&[Vector]> {
        match self {
            ConvexBody::Polytope { vertices } => Some(vertices),
            ConvexBody::Ball { .. } => None,
        }
    }

    /// `(center, radius)` of a full-dimensional ball.
    pub fn as_round_ball(&self) -> Option<(&Vector, f64)> {
        match self {
            ConvexBody::Ball {
                center,
                radius,
                span: None,
            } => Some((center, *radius)),
            _ => None,
        }
    }

    /// Support function `h(u) = max_{x∈K} ⟨x, u⟩`.
    pub fn support(&self, u: &Vector) -> f64 {
        match self {
            ConvexBody::Polytope { vertices } => vertices
                .iter()
                .map(|v| v.dot(u))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => {
                let reach = match span {
                    None => u.norm(),
                    Some(b) => b.tr_mul(u).norm(),
                };
                center.dot(u) + radius * reach
            }
        }
    }

    /// A point of the body (vertex centroid or center).
    pub fn reference_point(&self) -> Vector {
        match self {
            ConvexBody::Polytope { vertices } => {
                vertices.iter().fold(Vector::zeros(self.dim()), |a, v| a + v) / vertices.len() as f64
            }
            ConvexBody::Ball { center, .. } => center.clone(),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::param("query point has the wrong dimension"));
        }
        match self {
            ConvexBody::Polytope { vertices } => hull_membership(x, vertices, tol),
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => {
                let d = x - center;
                Ok(match span {
                    None => d.norm() <= radius + tol,
                    Some(b) => {
                        let inner = b.tr_mul(&d);
                        let off = (&d - b * &inner).norm();
                        off <= tol && inner.norm() <= radius + tol
                    }
                })
            }
        }
    }

    /// `t·K` for `t > 0` (scaling about the origin).
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param(format!("scale factor must be positive, got {t}")));
        }
        Ok(match self {
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(|v| v * t).collect(),
            },
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => ConvexBody::Ball {
                center: center * t,
                radius: radius * t,
                span: span.clone(),
            },
        })
    }

    /// `ϑK + x` for an orthogonal `ϑ` and translation `x`.
    pub fn apply_rigid_motion(&self, rotation: &DMatrix<f64>, translation: &Vector) -> Result<Self> {
        let n = self.dim();
        check_orthogonal(rotation, n)?;
        if translation.len() != n {
            return Err(Error::param("translation has the wrong dimension"));
        }
        Ok(match self {
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(|v| rotation * v + translation).collect(),
            },
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => ConvexBody::Ball {
                center: rotation * center + translation,
                radius: *radius,
                span: span.as_ref().map(|b| rotation * b),
            },
        })
    }

    /// Zero-pads the body into `R^{n+extra}`. Balls become flat.
    pub fn embed(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let n = self.dim();
        let pad = |v: &Vector| {
            let mut w = Vector::zeros(n + extra);
            w.rows_mut(0, n).copy_from(v);
            w
        };
        match self {
            ConvexBody::Polytope { vertices } => ConvexBody::Polytope {
                vertices: vertices.iter().map(pad).collect(),
            },
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => {
                let basis = span.clone().unwrap_or_else(|| DMatrix::identity(n, n));
                let mut padded = DMatrix::zeros(n + extra, basis.ncols());
                padded.rows_mut(0, n).copy_from(&basis);
                ConvexBody::Ball {
                    center: pad(center),
                    radius: *radius,
                    span: Some(padded),
                }
            }
        }
    }

    /// Orthogonal projection onto the span of `frame`, in frame coordinates.
    pub fn shadow(&self, frame: &OrthonormalFrame) -> Result<Shadow> {
        if frame.ambient_dim() != self.dim() {
            return Err(Error::param("frame and body live in different dimensions"));
        }
        Ok(match self {
            ConvexBody::Polytope { vertices } => Shadow::Polytope(project_all(vertices, frame)),
            ConvexBody::Ball {
                center,
                radius,
                span,
            } => {
                let c = frame.basis().tr_mul(center);
                match span {
                    None => Shadow::round(c, *radius),
                    Some(b) => Shadow::ellipsoid(c, frame.basis().tr_mul(b) * *radius),
                }
            }
        })
    }

    /// The body itself viewed as a shadow in its own coordinates.
    pub fn as_shadow(&self) -> Shadow {
        let f = OrthonormalFrame::coordinate(self.dim(), self.dim()).expect("valid dimension");
        self.shadow(&f).expect("matching dimension")
    }
}

/// A projected body in `R^j`: either a point set whose hull is the shadow
/// or the ellipsoid `{c + L y : |y| ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Shadow {
    Polytope(Vec<Vector>),
    Ellipsoid {
        center: Vector,
        factor: DMatrix<f64>,
        /// Radius when the ellipsoid is a round ball.
        round: Option<f64>,
        /// `(LLᵀ)^{-1}` when it exists; `None` for a flat ellipsoid.
        precision: Option<DMatrix<f64>>,
    },
}

impl Shadow {
    pub fn round(center: Vector, radius: f64) -> Self {
        let j = center.len();
        Shadow::Ellipsoid {
            factor: DMatrix::identity(j, j) * radius,
            round: Some(radius),
            precision: Some(DMatrix::identity(j, j) / (radius * radius)),
            center,
        }
    }

    pub fn ellipsoid(center: Vector, factor: DMatrix<f64>) -> Self {
        let shape = &factor * factor.transpose();
        let scale = shape.amax();
        // Flat shadows have zero j-volume; they carry no precision matrix.
        let precision = if scale > 0.0 && shape.determinant().abs() > 1e-12 * scale.powi(shape.nrows() as i32) {
            shape.try_inverse()
        } else {
            None
        };
        Shadow::Ellipsoid {
            center,
            factor,
            round: None,
            precision,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shadow::Polytope(p) => p[0].len(),
            Shadow::Ellipsoid { center, .. } => center.len(),
        }
    }

    pub fn support(&self, u: &Vector) -> f64 {
        match self {
            Shadow::Polytope(p) => p.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max),
            Shadow::Ellipsoid { center, factor, .. } => center.dot(u) + factor.tr_mul(u).norm(),
        }
    }

    pub fn reference_point(&self) -> Vector {
        match self {
            Shadow::Polytope(p) => p.iter().fold(Vector::zeros(self.dim()), |a, v| a + v) / p.len() as f64,
            Shadow::Ellipsoid { center, .. } => center.clone(),
        }
    }

    /// Membership up to `tol`; flat ellipsoids contain nothing of positive
    /// measure and report `false`.
    pub fn contains(&self, z: &Vector, tol: f64) -> Result<bool> {
        match self {
            Shadow::Polytope(p) => hull_membership(z, p, tol),
            Shadow::Ellipsoid {
                center, precision, ..
            } => Ok(match precision {
                Some(pm) => {
                    let w = z - center;
                    w.dot(&(pm * &w)) <= 1.0 + tol
                }
                None => false,
            }),
        }
    }

    /// Radial function from an interior point `from`.
    pub fn radial(&self, from: &Vector, dir: &Vector) -> Result<f64> {
        match self {
            Shadow::Polytope(p) => radial_function(from, dir, p),
            Shadow::Ellipsoid {
                center, precision, ..
            } => {
                let Some(pm) = precision else {
                    return Ok(0.0);
                };
                let w = from - center;
                let pu = pm * dir;
                let a = dir.dot(&pu);
                let b = 2.0 * w.dot(&pu);
                let c = w.dot(&(pm * &w)) - 1.0;
                let disc = (b * b - 4.0 * a * c).max(0.0);
                Ok(((-b + disc.sqrt()) / (2.0 * a)).max(0.0))
            }
        }
    }

    /// Largest distance from `from` to a point of the shadow.
    pub fn reach_from(&self, from: &Vector) -> f64 {
        match self {
            Shadow::Polytope(p) => p.iter().map(|v| (v - from).norm()).fold(0.0, f64::max),
            Shadow::Ellipsoid { center, factor, .. } => {
                (center - from).norm() + factor.singular_values().max()
            }
        }
    }

    /// Volume of an ellipsoidal shadow, `κ_j·sqrt(det LLᵀ)`.
    pub fn ellipsoid_volume(&self) -> Option<f64> {
        match self {
            Shadow::Polytope(_) => None,
            Shadow::Ellipsoid { factor, precision, .. } => {
                let j = factor.nrows();
                Some(match precision {
                    Some(_) => {
                        crate::special::ball_volume(j) * (factor * factor.transpose()).determinant().max(0.0).sqrt()
                    }
                    None => 0.0,
                })
            }
        }
    }
}
