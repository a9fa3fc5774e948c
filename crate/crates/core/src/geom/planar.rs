//! Exact planar geometry: convex hulls, convex clipping and the area of a
//! convex polygon intersected with a disk.

use crate::error::{Error, Result};
use nalgebra::Vector2;
use rand::Rng;
use std::f64::consts::PI;

pub type Point2 = Vector2<f64>;

/// Distance-to-circle band treated as tangency.
pub const TANGENCY_TOL: f64 = 1e-12;

#[inline]
fn cross(a: Point2, b: Point2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[inline]
fn orient(o: Point2, a: Point2, b: Point2) -> f64 {
    cross(a - o, b - o)
}

/// Convex hull in counterclockwise order without collinear vertices
/// (Andrew's monotone chain). Fewer than three returned points means the
/// hull is degenerate.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Area of a polygon given in order (absolute shoelace value).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let k = poly.len();
    (0..k)
        .map(|i| cross(poly[i], poly[(i + 1) % k]))
        .sum::<f64>()
        .abs()
        * 0.5
}

/// Whether `q` lies in the counterclockwise convex polygon `hull`, allowing
/// an outward slack of `tol` per edge.
pub fn point_in_convex_polygon(hull: &[Point2], q: Point2, tol: f64) -> bool {
    if hull.len() < 3 {
        return false;
    }
    let k = hull.len();
    (0..k).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % k]);
        let e = b - a;
        cross(e, q - a) >= -tol * e.norm()
    })
}

/// Intersection of two counterclockwise convex polygons (Sutherland–Hodgman).
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    if subject.len() < 3 || clip.len() < 3 {
        return Vec::new();
    }
    let mut output = subject.to_vec();
    let k = clip.len();
    for i in 0..k {
        if output.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % k]);
        let input = std::mem::take(&mut output);
        let side = |p: Point2| orient(a, b, p);
        let m = input.len();
        for idx in 0..m {
            let cur = input[idx];
            let prev = input[(idx + m - 1) % m];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(prev + (cur - prev) * (sp / (sp - sc)));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
    }
    output
}

/// Area of `A △ B` for two convex polygons given by arbitrary point sets.
pub fn polygon_symdiff(a: &[Point2], b: &[Point2]) -> f64 {
    let ha = convex_hull(a);
    let hb = convex_hull(b);
    let inter = polygon_area(&clip_convex(&ha, &hb));
    (polygon_area(&ha) + polygon_area(&hb) - 2.0 * inter).max(0.0)
}

/// Signed area of `disk(0, r) ∩ triangle(0, a, b)`.
fn triangle_disk_area(a: Point2, b: Point2, r: f64) -> f64 {
    let d = b - a;
    let qa = d.norm_squared();
    if qa == 0.0 {
        return 0.0;
    }
    let qb = a.dot(&d);
    let qc = a.norm_squared() - r * r;
    let disc = qb * qb - qa * qc;
    let mut cuts = vec![0.0];
    // The chord only splits the edge when the line is not tangent.
    let line_dist = cross(a, b).abs() / qa.sqrt();
    if disc > 0.0 && (line_dist - r).abs() > TANGENCY_TOL {
        let s = disc.sqrt();
        for t in [(-qb - s) / qa, (-qb + s) / qa] {
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.push(1.0);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let p = a + d * w[0];
        let q = a + d * w[1];
        let mid = (p + q) * 0.5;
        if mid.norm() <= r {
            area += 0.5 * cross(p, q);
        } else {
            area += 0.5 * r * r * cross(p, q).atan2(p.dot(&q));
        }
    }
    area
}

/// Area of `conv(poly) ∩ disk(center, r)` by summing signed disk–triangle
/// intersections around the hull (circular-segment decomposition).
pub fn polygon_disk_intersection_area(hull: &[Point2], center: Point2, r: f64) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let k = hull.len();
    let total: f64 = (0..k)
        .map(|i| triangle_disk_area(hull[i] - center, hull[(i + 1) % k] - center, r))
        .sum();
    total.abs().min(PI * r * r).min(polygon_area(hull))
}

/// Exact area of `conv(poly) △ disk(center, r)`.
///
/// An empty (or degenerate) polygon contributes zero area, leaving the disk.
pub fn disk_polygon_symdiff(poly: &[Point2], center: Point2, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param(format!("disk radius must be positive, got {r}")));
    }
    let hull = convex_hull(poly);
    let disk = PI * r * r;
    if hull.len() < 3 {
        return Ok(disk);
    }
    let inter = polygon_disk_intersection_area(&hull, center, r);
    Ok((polygon_area(&hull) + disk - 2.0 * inter).max(0.0))
}

/// Uniform point in a counterclockwise convex polygon (fan triangulation).
pub fn sample_in_convex_polygon<R: Rng + ?Sized>(hull: &[Point2], rng: &mut R) -> Point2 {
    let k = hull.len();
    let areas: Vec<f64> = (1..k - 1)
        .map(|i| 0.5 * orient(hull[0], hull[i], hull[i + 1]).abs())
        .collect();
    let total: f64 = areas.iter().sum();
    let mut pick = rng.random::<f64>() * total;
    let mut t = areas.len() - 1;
    for (i, &a) in areas.iter().enumerate() {
        if pick < a {
            t = i;
            break;
        }
        pick -= a;
    }
    let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    hull[0] + (hull[t + 1] - hull[0]) * u + (hull[t + 2] - hull[0]) * v
}
