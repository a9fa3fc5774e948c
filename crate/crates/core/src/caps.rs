//! Cap measures, the constants of the beta-polytope asymptotics, and Monte
//! Carlo verifiers for each closed form.

use crate::beta::{cdf_f1_upper, ln_normalizer, BetaParams};
use crate::error::{Error, Result};
use crate::geom::planar::{convex_hull, polygon_area, Point2};
use crate::geom::{haar_subspace, simplex_volume, OrthonormalFrame, Vector};
use crate::special::{ln_ball_volume, ln_beta, ln_gamma, ln_sphere_area, ln_sphere_area_product};
use crate::stats::{Accumulator, McEstimate};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance for the agreement of two closed forms of one constant.
pub const DUAL_FORM_TOL: f64 = 1e-12;

/// A cap `{x ∈ B_n : x_n ≥ h}` measured under a beta law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapQuery {
    pub params: BetaParams,
    pub h: f64,
}

impl CapQuery {
    pub fn new(params: BetaParams, h: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::param(format!("cap height must lie in [0, 1], got {h}")));
        }
        Ok(CapQuery { params, h })
    }

    /// The cap whose base has radius `r`.
    pub fn from_base_radius(params: BetaParams, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::param(format!("base radius must lie in [0, 1], got {r}")));
        }
        Self::new(params, (1.0 - r * r).sqrt())
    }

    pub fn base_radius(&self) -> f64 {
        ((1.0 - self.h) * (1.0 + self.h)).sqrt()
    }

    /// Parameter of the one-dimensional marginal, `β + (n−1)/2`.
    fn marginal_beta(&self) -> Result<f64> {
        let b = self.params.beta + 0.5 * (self.params.n as f64 - 1.0);
        if b <= -1.0 {
            return Err(Error::param("the uniform law on S⁰ has no continuous cap measure"));
        }
        Ok(b)
    }
}

fn dual_form_check(what: &'static str, left: f64, right: f64) -> Result<f64> {
    if (left - right).abs() > DUAL_FORM_TOL * left.abs().max(right.abs()) {
        return Err(Error::Consistency { what, left, right });
    }
    Ok(left)
}

/// Beta measure of the cap, `1 − F_{1,β+(n−1)/2}(h)`.
///
/// The marginal of a coordinate is itself a one-dimensional beta law, so the
/// same expression covers the sphere limit `β = −1`.
pub fn cap_probability(q: CapQuery) -> Result<f64> {
    cdf_f1_upper(q.marginal_beta()?, q.h)
}

/// Derivative of [`cap_probability`] in `h`: `−c_{1,b}(1 − h²)^b` with
/// `b = β + (n−1)/2`.
pub fn cap_derivative(q: CapQuery) -> Result<f64> {
    let b = q.marginal_beta()?;
    let c = ln_normalizer(1.0, b).exp();
    Ok(-c * ((1.0 - q.h) * (1.0 + q.h)).powf(b))
}

/// Lower bound, cap measure times `d_{n,β}`, and upper bound of the cap
/// sandwich `r^m ≤ d·v ≤ r^m(1 + r²)` with `m = n + 2β + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapSandwich {
    pub lower: f64,
    pub scaled_measure: f64,
    pub upper: f64,
}

impl CapSandwich {
    pub fn holds(&self) -> bool {
        self.lower <= self.scaled_measure && self.scaled_measure <= self.upper
    }
}

/// Evaluates both sides of the cap sandwich; only defined for `β > −1` and
/// base radius in `(0, 3/4)`.
pub fn cap_sandwich(q: CapQuery) -> Result<CapSandwich> {
    if q.params.is_sphere() {
        return Err(Error::param("the cap sandwich is only established for β > −1"));
    }
    let r = q.base_radius();
    if !(r > 0.0 && r < 0.75) {
        return Err(Error::param(format!("cap sandwich needs r ∈ (0, 3/4), got r = {r}")));
    }
    let m = q.params.n as f64 + 2.0 * q.params.beta + 1.0;
    let rm = r.powf(m);
    let d = d_const(q.params.n, q.params.beta)?;
    Ok(CapSandwich {
        lower: rm,
        scaled_measure: d * cap_probability(q)?,
        upper: rm * (1.0 + r * r),
    })
}

/// Whether the cap sandwich holds at `q`.
pub fn cap_bounds_check(q: CapQuery) -> Result<bool> {
    Ok(cap_sandwich(q)?.holds())
}

fn check_n_beta(n: usize, beta: f64) -> Result<f64> {
    if n == 0 || !(beta >= -1.0) {
        return Err(Error::param(format!("need n ≥ 1 and β ≥ −1, got n={n}, β={beta}")));
    }
    let m = n as f64 + 2.0 * beta + 1.0;
    if m <= 0.0 {
        return Err(Error::param("n + 2β + 1 must be positive"));
    }
    Ok(m)
}

/// `ln d_{n,β}`, from `(n + 2β + 1)/c_{1,β+(n−1)/2}` and checked against
/// `2π / B(1/2, n/2 + β + 1)`.
fn ln_d_const(n: usize, beta: f64) -> Result<f64> {
    let m = check_n_beta(n, beta)?;
    let b = beta + 0.5 * (n as f64 - 1.0);
    let by_normalizer = m.ln() - ln_normalizer(1.0, b);
    let by_beta_function = (2.0 * PI).ln() - ln_beta(0.5, 0.5 * n as f64 + beta + 1.0);
    dual_form_check("d_{n,β} dual forms", by_normalizer.exp(), by_beta_function.exp())?;
    Ok(by_normalizer)
}

/// The cap constant `d_{n,β}`. The sphere limit `β = −1` is accepted for
/// `n ≥ 2` through the gamma expressions.
pub fn d_const(n: usize, beta: f64) -> Result<f64> {
    Ok(ln_d_const(n, beta)?.exp())
}

/// Limit of `N^{2/(n+2β+1)} E vol_n(B_n ∖ P)` for the beta polytope with `N`
/// vertices.
pub fn affentranger_a(n: usize, beta: f64) -> Result<f64> {
    let m = check_n_beta(n, beta)?;
    let nf = n as f64;
    let ln_a = ln_sphere_area(n) - std::f64::consts::LN_2 + (m / (m + 2.0)).ln()
        + ln_gamma(nf + 1.0 + 2.0 / m)
        - ln_gamma(nf + 1.0)
        + 2.0 / m * ln_d_const(n, beta)?;
    Ok(ln_a.exp())
}

/// `A_{n,β}/ω_n`, which tends to 1/2 as `n` grows.
pub fn affentranger_ratio(n: usize, beta: f64) -> Result<f64> {
    Ok(affentranger_a(n, beta)? / ln_sphere_area(n).exp())
}

/// The flag coefficient, evaluated as `C(n,j) κ_n/(κ_j κ_{n−j})` and checked
/// against `ω_{j+1} ω_{n−j+1} / (2 ω_{n+1})`.
pub fn flag_coefficient(n: usize, j: usize) -> Result<f64> {
    if j == 0 || j > n {
        return Err(Error::param(format!("flag coefficient needs 1 ≤ j ≤ n, got n={n}, j={j}")));
    }
    let binomial = crate::special::ln_binomial(n, j);
    let by_volumes = binomial + ln_ball_volume(n as f64)
        - ln_ball_volume(j as f64)
        - ln_ball_volume((n - j) as f64);
    let by_areas = ln_sphere_area(j + 1) + ln_sphere_area(n - j + 1)
        - ln_sphere_area(n + 1)
        - std::f64::consts::LN_2;
    dual_form_check("flag coefficient dual forms", by_volumes.exp(), by_areas.exp())
}

/// Second moment of the volume of the simplex spanned by `n` beta points in
/// `B_{n−1}`: `n / ((n−1)! (n + 2β + 1)^{n−1})`.
pub fn simplex_second_moment(n: usize, beta: f64) -> Result<f64> {
    if n < 2 || !(beta > -1.0) {
        return Err(Error::param(format!("need n ≥ 2 and β > −1, got n={n}, β={beta}")));
    }
    let nf = n as f64;
    let ln = nf.ln() - ln_gamma(nf) - (nf - 1.0) * (nf + 2.0 * beta + 1.0).ln();
    Ok(ln.exp())
}

/// Closed form of the weighted second moment on the slice `{x_n = h}`:
/// `(c_{n,β}/c_{n−1,β})^n (1 − h²)^{nβ + (n−1)(n+2)/2} E[V²]`.
pub fn slice_moment(n: usize, beta: f64, h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::param(format!("slice height must lie in [0, 1], got {h}")));
    }
    let secmom = simplex_second_moment(n, beta)?;
    let nf = n as f64;
    let ratio = ln_normalizer(nf, beta) - ln_normalizer(nf - 1.0, beta);
    let exponent = nf * beta + 0.5 * (nf - 1.0) * (nf + 2.0);
    let base = (1.0 - h) * (1.0 + h);
    if base == 0.0 {
        return Ok(if exponent > 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((nf * ratio + exponent * base.ln()).exp() * secmom)
}

/// `E (cos Θ)^ℓ` over Haar `j`-subspaces `H`, where `cos Θ` is the
/// projection factor between `H` and a fixed `j`-subspace.
pub fn chern_constant(n: usize, j: usize, l: usize) -> Result<f64> {
    if j == 0 || j > n || l == 0 {
        return Err(Error::param(format!("need 1 ≤ j ≤ n and ℓ ≥ 1, got n={n}, j={j}, ℓ={l}")));
    }
    let w = ln_sphere_area_product;
    let ln = w(n + l) + w(l) + w(j) + w(n - j) - w(n) - w(l + j) - w(n - j + l);
    Ok(ln.exp())
}

/// The constants attached to one `(n, j, β, ℓ)` choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub d: f64,
    pub a: f64,
    pub flag: f64,
    pub chern: f64,
    /// Simplex second moment; absent for `n = 1` or in the sphere limit.
    pub secmom: Option<f64>,
}

impl ConstantsBundle {
    pub fn compute(n: usize, j: usize, beta: f64, l: usize) -> Result<Self> {
        let secmom = if n >= 2 && beta > -1.0 {
            Some(simplex_second_moment(n, beta)?)
        } else {
            None
        };
        Ok(ConstantsBundle {
            d: d_const(n, beta)?,
            a: affentranger_a(n, beta)?,
            flag: flag_coefficient(n, j)?,
            chern: chern_constant(n, j, l)?,
            secmom,
        })
    }
}

/// A Monte Carlo estimate next to the closed form it should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub estimate: McEstimate,
    pub expected: f64,
}

impl Verification {
    /// Signed deviation in standard errors (0 when both are exact and equal).
    pub fn z_score(&self) -> f64 {
        let diff = self.estimate.value - self.expected;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.estimate.std_error
        }
    }

    pub fn relative_error(&self) -> f64 {
        (self.estimate.value - self.expected).abs() / self.expected.abs()
    }

    pub fn within_sigma(&self, k: f64) -> bool {
        self.z_score().abs() <= k
    }
}

fn require_samples(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::param("a Monte Carlo check needs at least two samples"));
    }
    Ok(())
}

/// Fraction of `m` draws with last coordinate at least `h`.
pub fn verify_cap_probability<R: Rng + ?Sized>(q: CapQuery, m: usize, rng: &mut R) -> Result<Verification> {
    require_samples(m)?;
    let expected = cap_probability(q)?;
    let last = q.params.n - 1;
    let acc: Accumulator = (0..m)
        .map(|_| if q.params.sample(rng)[last] >= q.h { 1.0 } else { 0.0 })
        .collect();
    Ok(Verification { estimate: acc.estimate(), expected })
}

/// Mean squared volume of simplices spanned by `n` beta points in `B_{n−1}`.
pub fn verify_simplex_second_moment<R: Rng + ?Sized>(
    n: usize,
    beta: f64,
    m: usize,
    rng: &mut R,
) -> Result<Verification> {
    require_samples(m)?;
    let expected = simplex_second_moment(n, beta)?;
    let law = BetaParams::new(n - 1, beta)?;
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let pts: Vec<Vector> = (0..n).map(|_| law.sample(rng)).collect();
        acc.push(simplex_volume(&pts)?.powi(2));
    }
    Ok(Verification { estimate: acc.estimate(), expected })
}

/// Monte Carlo estimate of the weighted slice moment.
///
/// The beta density restricted to `{x_n = h}` is a multiple of the beta law
/// with the same `β` on the `(n−1)`-ball of radius `r = √(1 − h²)`, with total
/// mass `(c_{n,β}/c_{n−1,β}) r^{2β+n−1}`; points are drawn from that law,
/// placed on the slice, and the squared simplex volume is weighted by the
/// `n`-th power of the mass.
pub fn weighted_slice_moment_check<R: Rng + ?Sized>(
    n: usize,
    beta: f64,
    h: f64,
    m: usize,
    rng: &mut R,
) -> Result<Verification> {
    require_samples(m)?;
    if !(0.0..1.0).contains(&h) {
        return Err(Error::param(format!("slice height must lie in [0, 1), got {h}")));
    }
    let expected = slice_moment(n, beta, h)?;
    let nf = n as f64;
    let r = ((1.0 - h) * (1.0 + h)).sqrt();
    let ln_mass = ln_normalizer(nf, beta) - ln_normalizer(nf - 1.0, beta)
        + (2.0 * beta + nf - 1.0) * r.ln();
    let weight = (nf * ln_mass).exp();
    let law = BetaParams::new(n - 1, beta)?;
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let pts: Vec<Vector> = (0..n)
            .map(|_| {
                let y = law.sample(rng) * r;
                Vector::from_fn(n, |i, _| if i + 1 < n { y[i] } else { h })
            })
            .collect();
        acc.push(weight * simplex_volume(&pts)?.powi(2));
    }
    Ok(Verification { estimate: acc.estimate(), expected })
}

/// Mean of `(cos Θ)^ℓ` between Haar `j`-subspaces and the span of the first
/// `j` coordinate vectors.
pub fn verify_chern_constant<R: Rng + ?Sized>(
    n: usize,
    j: usize,
    l: usize,
    m: usize,
    rng: &mut R,
) -> Result<Verification> {
    require_samples(m)?;
    let expected = chern_constant(n, j, l)?;
    let fixed = OrthonormalFrame::coordinate(n, j)?;
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let h = haar_subspace(n, j, rng)?;
        acc.push(h.projection_factor(&fixed)?.powi(l as i32));
    }
    Ok(Verification { estimate: acc.estimate(), expected })
}

/// Hit-or-miss integral of the beta density over the cube `[−1, 1]^n`.
pub fn verify_normalizer<R: Rng + ?Sized>(p: BetaParams, m: usize, rng: &mut R) -> Result<Verification> {
    require_samples(m)?;
    let cube = 2f64.powi(p.n as i32);
    let mut acc = Accumulator::new();
    for _ in 0..m {
        let x = Vector::from_fn(p.n, |_, _| rng.random_range(-1.0..1.0));
        acc.push(cube * p.density(&x)?);
    }
    Ok(Verification { estimate: acc.estimate(), expected: 1.0 })
}

/// `E vol_2(B_2 ∖ P)` for the planar beta polytope with `n_points` vertices,
/// using the exact hull area of each of `reps` replicates.
pub fn planar_missed_area<R: Rng + ?Sized>(
    beta: f64,
    n_points: usize,
    reps: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    require_samples(reps)?;
    let law = BetaParams::new(2, beta)?;
    let mut pts = Vec::with_capacity(n_points);
    let mut acc = Accumulator::new();
    for _ in 0..reps {
        pts.clear();
        pts.extend((0..n_points).map(|_| {
            let x = law.sample(rng);
            Point2::new(x[0], x[1])
        }));
        acc.push(PI - polygon_area(&convex_hull(&pts)));
    }
    Ok(acc.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::special::{ball_volume, integrate};

    fn q(n: usize, beta: f64, h: f64) -> CapQuery {
        CapQuery::new(BetaParams::new(n, beta).unwrap(), h).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cap_probability_endpoints() {
        for &(n, beta) in &[(2, 0.0), (3, 0.0), (3, 1.0), (3, -1.0), (5, 2.5)] {
            assert!((cap_probability(q(n, beta, 0.0)).unwrap() - 0.5).abs() < 1e-14);
            assert_eq!(cap_probability(q(n, beta, 1.0)).unwrap(), 0.0);
        }
        assert!(CapQuery::new(BetaParams::new(2, 0.0).unwrap(), 1.2).is_err());
        assert!(cap_probability(q(1, -1.0, 0.3)).is_err());
    }

    #[test]
    fn cap_probability_of_the_disk_is_a_circular_segment() {
        for &h in &[0.1f64, 0.3, 0.8] {
            let seg = h.acos() - h * (1.0 - h * h).sqrt();
            assert!(rel(cap_probability(q(2, 0.0, h)).unwrap(), seg / PI) < 1e-13);
        }
        // Archimedes: the sphere cap above h has area fraction (1 − h)/2.
        assert!(rel(cap_probability(q(3, -1.0, 0.4)).unwrap(), 0.3) < 1e-13);
    }

    #[test]
    fn cap_probability_monte_carlo() {
        let mut rng = stream(11);
        let v = verify_cap_probability(q(2, 0.0, 0.3), 100_000, &mut rng).unwrap();
        assert!(v.within_sigma(3.0), "{v:?}");
    }

    #[test]
    fn cap_derivative_matches_finite_difference() {
        for &(n, beta) in &[(2, 0.0), (3, 1.0), (4, -0.5), (3, -1.0)] {
            let h = 0.4;
            let e = 1e-5;
            let fd = (cap_probability(q(n, beta, h + e)).unwrap() - cap_probability(q(n, beta, h - e)).unwrap())
                / (2.0 * e);
            let d = cap_derivative(q(n, beta, h)).unwrap();
            assert!(rel(fd, d) < 1e-6, "n={n} β={beta}: {fd} vs {d}");
        }
        assert_eq!(cap_derivative(q(3, 0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn cap_is_monotone() {
        for &(n, beta) in &[(2, 0.0), (3, -1.0), (6, 1.5)] {
            let mut prev = 1.0;
            for i in 0..=100 {
                let c = q(n, beta, i as f64 / 100.0);
                let v = cap_probability(c).unwrap();
                assert!(v <= prev);
                assert!(cap_derivative(c).unwrap() <= 0.0);
                prev = v;
            }
        }
    }

    #[test]
    fn cap_sandwich_examples() {
        let p = |n, b| BetaParams::new(n, b).unwrap();
        assert!(cap_bounds_check(CapQuery::from_base_radius(p(2, 0.0), 0.5).unwrap()).unwrap());
        assert!(cap_bounds_check(CapQuery::from_base_radius(p(4, 1.0), 0.7).unwrap()).unwrap());
        assert!(cap_bounds_check(CapQuery::from_base_radius(p(2, 0.0), 0.75).unwrap()).is_err());
        assert!(cap_bounds_check(CapQuery::from_base_radius(BetaParams::sphere(3).unwrap(), 0.5).unwrap()).is_err());
        let s = cap_sandwich(CapQuery::from_base_radius(p(3, 0.5), 1e-3).unwrap()).unwrap();
        assert!(s.upper < 1e-9);
        assert!((s.scaled_measure / s.lower - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cap_sandwich_on_a_grid() {
        for n in 1..=8 {
            for &beta in &[-0.9, -0.5, 0.0, 0.5, 1.0, 3.0] {
                for k in 1..75 {
                    let c = CapQuery::from_base_radius(BetaParams::new(n, beta).unwrap(), k as f64 / 100.0).unwrap();
                    let s = cap_sandwich(c).unwrap();
                    // Relative slack for rounding in the incomplete beta evaluation.
                    let slack = 1e-12 * s.upper;
                    assert!(
                        s.lower - slack <= s.scaled_measure && s.scaled_measure <= s.upper + slack,
                        "n={n} β={beta} r={}: {s:?}",
                        k as f64 / 100.0
                    );
                }
            }
        }
    }

    #[test]
    fn d_constant_values() {
        assert!((d_const(1, 0.0).unwrap() - 4.0).abs() < 1e-13);
        // 2π / B(1/2, 2) with B(1/2, 2) = ∫ t^{−1/2}(1 − t) dt = 4/3.
        let b = integrate(|t: f64| (1.0 - t) / t.sqrt(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((b - 4.0 / 3.0).abs() < 1e-9);
        assert!(rel(d_const(2, 0.0).unwrap(), 2.0 * PI / b) < 1e-9);
        for n in 1..40 {
            for &beta in &[-0.5, 0.0, 0.7, 4.0, 50.0] {
                d_const(n, beta).unwrap();
            }
            if n >= 2 {
                d_const(n, -1.0).unwrap();
            }
        }
        assert!(d_const(1, -1.0).is_err());
    }

    #[test]
    fn affentranger_values() {
        assert!((affentranger_a(1, 0.0).unwrap() - 4.0).abs() < 1e-12);
        // Independent evaluation of the defining expression at n = 2, β = 0.
        let d = 2.0 * PI / (4.0 / 3.0);
        let gamma_ratio = crate::special::gamma_ratio(3.0, 2.0 / 3.0);
        let expected = PI * 0.6 * gamma_ratio * d.powf(2.0 / 3.0);
        assert!(rel(affentranger_a(2, 0.0).unwrap(), expected) < 1e-12);
    }

    #[test]
    fn flag_coefficient_values() {
        for n in 1..60 {
            assert!((flag_coefficient(n, n).unwrap() - 1.0).abs() < 1e-12);
            for j in 1..=n {
                flag_coefficient(n, j).unwrap();
            }
        }
        assert!(rel(flag_coefficient(2, 1).unwrap(), PI / 2.0) < 1e-13);
        let direct = 3.0 * ball_volume(3) / (ball_volume(1) * ball_volume(2));
        assert!(rel(flag_coefficient(3, 1).unwrap(), direct) < 1e-13);
        assert!(rel(flag_coefficient(3, 1).unwrap(), 2.0) < 1e-13);
        assert!(flag_coefficient(3, 0).is_err());
        assert!(flag_coefficient(3, 4).is_err());
    }

    #[test]
    fn simplex_moment_values() {
        assert!((simplex_second_moment(2, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((simplex_second_moment(2, 1.0).unwrap() - 0.4).abs() < 1e-14);
        assert!((simplex_second_moment(3, 0.0).unwrap() - 3.0 / 32.0).abs() < 1e-14);
        assert!(simplex_second_moment(1, 0.0).is_err());
    }

    #[test]
    fn simplex_moment_monte_carlo() {
        let mut rng = stream(12);
        for &(n, beta) in &[(2, 0.0), (3, 0.0), (2, 1.0)] {
            let v = verify_simplex_second_moment(n, beta, 100_000, &mut rng).unwrap();
            assert!(v.relative_error() < 0.02, "({n},{beta}): {v:?}");
        }
    }

    #[test]
    fn slice_moment_monte_carlo() {
        let mut rng = stream(13);
        for &(n, beta, h) in &[(2, 0.0, 0.0), (3, 0.0, 0.5), (3, 1.0, 0.3)] {
            let v = weighted_slice_moment_check(n, beta, h, 100_000, &mut rng).unwrap();
            assert!(v.relative_error() < 0.05, "({n},{beta},{h}): {v:?}");
        }
    }

    #[test]
    fn slice_moment_normalizer_ratio_duplication_form() {
        for &(n, beta) in &[(2usize, 0.0), (3, 0.5), (7, 2.0)] {
            let nf = n as f64;
            let m = nf + 2.0 * beta;
            let dup = -m * 2f64.ln() + ln_gamma(m + 1.0) - 2.0 * ln_gamma((m + 1.0) / 2.0);
            let ratio = ln_normalizer(nf, beta) - ln_normalizer(nf - 1.0, beta);
            assert!((dup - ratio).abs() < 1e-12);
        }
        assert_eq!(slice_moment(3, 0.0, 1.0).unwrap(), 0.0);
        assert!(slice_moment(3, 0.0, 0.999).unwrap() < slice_moment(3, 0.0, 0.5).unwrap());
    }

    #[test]
    fn chern_constant_values() {
        for n in 1..10 {
            for l in 1..5 {
                assert!((chern_constant(n, n, l).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(rel(chern_constant(2, 1, 1).unwrap(), 2.0 / PI) < 1e-13);
        assert!(rel(chern_constant(3, 1, 2).unwrap(), 1.0 / 3.0) < 1e-13);
        // E|u₁| for u uniform on S²: 1/2.
        assert!(rel(chern_constant(3, 1, 1).unwrap(), 0.5) < 1e-13);
    }

    #[test]
    fn chern_constant_monte_carlo() {
        let mut rng = stream(14);
        let v = verify_chern_constant(3, 1, 2, 1_000_000, &mut rng).unwrap();
        assert!(v.relative_error() < 0.01, "{v:?}");
        let v = verify_chern_constant(4, 2, 1, 100_000, &mut rng).unwrap();
        assert!(v.within_sigma(4.0), "{v:?}");
    }

    #[test]
    fn normalizer_monte_carlo() {
        let mut rng = stream(15);
        for &(n, beta) in &[(1, 0.5), (2, -0.5), (3, 1.0)] {
            let v = verify_normalizer(BetaParams::new(n, beta).unwrap(), 200_000, &mut rng).unwrap();
            assert!(v.within_sigma(3.0), "({n},{beta}): {v:?}");
        }
    }

    #[test]
    fn bundle_is_positive() {
        let b = ConstantsBundle::compute(4, 2, 0.5, 2).unwrap();
        for v in [b.d, b.a, b.flag, b.chern, b.secmom.unwrap()] {
            assert!(v > 0.0);
        }
        assert!(ConstantsBundle::compute(3, 3, -1.0, 1).unwrap().secmom.is_none());
    }

    #[test]
    fn planar_missed_area_matches_the_asymptotic_constant() {
        let mut rng = stream(16);
        let n_points = 2000;
        let est = planar_missed_area(0.0, n_points, 300, &mut rng).unwrap();
        let scaled = est.value * (n_points as f64).powf(2.0 / 3.0);
        let a = affentranger_a(2, 0.0).unwrap();
        assert!(rel(scaled, a) < 0.1, "{scaled} vs {a}");
    }
}
