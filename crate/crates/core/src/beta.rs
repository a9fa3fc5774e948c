//! Beta distributions on the unit ball and the uniform sphere limit.
//!
//! The law with parameter `β > −1` has density `c_{n,β}(1 − ‖x‖²)^β` on the
//! open unit ball. As `β → −1` it converges weakly to the uniform law on the
//! sphere, which is represented explicitly and never through a density.

use crate::error::{Error, Result};
use crate::geom::{gaussian_vector, Vector};
use crate::special::{ln_gamma, regularized_incomplete_beta, regularized_incomplete_beta_upper};
use crate::stats::ks_statistic;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `(n, β)` with `β ≥ −1`; `β = −1` is the uniform-on-sphere limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub n: usize,
    pub beta: f64,
}

impl BetaParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        if !(beta >= -1.0) || !beta.is_finite() {
            return Err(Error::param(format!("beta must be ≥ −1, got {beta}")));
        }
        Ok(BetaParams { n, beta })
    }

    /// The uniform law on `S^{n−1}`.
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(n, -1.0)
    }

    pub fn is_sphere(&self) -> bool {
        self.beta == -1.0
    }

    fn require_density(&self) -> Result<()> {
        if self.is_sphere() {
            Err(Error::param("the sphere limit (β = −1) has no density on the ball"))
        } else {
            Ok(())
        }
    }

    /// Density at `x` (zero outside the open ball).
    pub fn density(&self, x: &Vector) -> Result<f64> {
        let c = normalizer(*self)?;
        let s = x.norm_squared();
        Ok(if s < 1.0 { c * (1.0 - s).powf(self.beta) } else { 0.0 })
    }

    /// Draws one point: the sphere law for `β = −1`, otherwise the beta law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        if self.is_sphere() {
            sample_sphere(self.n, rng)
        } else {
            sample_radial(self.n, self.beta, rng)
        }
    }

    /// CDF of `‖X‖²`, a `Beta(n/2, β+1)` variable (a point mass at 1 for
    /// the sphere).
    pub fn squared_radius_cdf(&self, s: f64) -> Result<f64> {
        beta_cdf(0.5 * self.n as f64, self.beta + 1.0, s)
    }
}

/// CDF of `Beta(a, b)`; `b = 0` is read as the point mass at 1.
pub(crate) fn beta_cdf(a: f64, b: f64, s: f64) -> Result<f64> {
    if b == 0.0 {
        return Ok(if s >= 1.0 - 1e-12 { 1.0 } else { 0.0 });
    }
    regularized_incomplete_beta(a, b, s)
}

/// `ln c_{n,β}`.
pub(crate) fn ln_normalizer(n: f64, beta: f64) -> f64 {
    ln_gamma(0.5 * n + beta + 1.0) - 0.5 * n * PI.ln() - ln_gamma(beta + 1.0)
}

/// The normalization constant `c_{n,β} = Γ(n/2 + β + 1) / (π^{n/2} Γ(β + 1))`.
pub fn normalizer(p: BetaParams) -> Result<f64> {
    p.require_density()?;
    Ok(ln_normalizer(p.n as f64, p.beta).exp())
}

/// `c_{1,β}` for real `β > −1`.
pub fn normalizer_1d(beta: f64) -> Result<f64> {
    normalizer(BetaParams::new(1, beta)?)
}

fn sample_radial<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Vector {
    // For β near −1 the radius can round to 1; such draws are redrawn so
    // the support stays the open ball.
    loop {
        let u = sample_sphere(n, rng);
        let s = sample_beta_variate(0.5 * n as f64, beta + 1.0, rng);
        let x = u * s.sqrt();
        if x.norm_squared() < 1.0 {
            return x;
        }
    }
}

/// `Beta(a, b)` variate as `G_a / (G_a + G_b)` with independent gammas.
pub(crate) fn sample_beta_variate<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let ga = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
    let gb = Gamma::new(b, 1.0).expect("positive shape").sample(rng);
    let s = ga / (ga + gb);
    if s.is_nan() {
        // Both gammas underflowed to zero; only reachable for tiny shapes.
        if rng.random::<f64>() < a / (a + b) { 1.0 } else { 0.0 }
    } else {
        s
    }
}

/// One draw from the beta law with parameters `p` (`β > −1`).
///
/// Direction uniform on the sphere, squared radius `Beta(n/2, β + 1)`.
pub fn sample_beta<R: Rng + ?Sized>(p: BetaParams, rng: &mut R) -> Result<Vector> {
    p.require_density()?;
    Ok(sample_radial(p.n, p.beta, rng))
}

/// Uniform point on `S^{n−1}` (normalized Gaussian).
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    loop {
        let g = gaussian_vector(n, rng);
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}

/// Value of a one-dimensional CDF and whether the argument was clamped
/// into `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Value {
    pub value: f64,
    pub clamped: bool,
}

/// `F_{1,β}(h) = c_{1,β} ∫_{−1}^{h} (1 − x²)^β dx`.
///
/// With `u = (1 + x)/2` the law is `Beta(β+1, β+1)`, so this is the
/// regularized incomplete beta function at `(1 + h)/2`.
pub fn cdf_f1(beta: f64, h: f64) -> Result<F1Value> {
    if !(beta > -1.0) {
        return Err(Error::param(format!("F_1 needs β > −1, got {beta}")));
    }
    if h.is_nan() {
        return Err(Error::param("F_1 evaluated at NaN"));
    }
    let clamped = !(-1.0..=1.0).contains(&h);
    let h = h.clamp(-1.0, 1.0);
    let a = beta + 1.0;
    let value = if h <= 0.0 {
        regularized_incomplete_beta(a, a, 0.5 * (1.0 + h))?
    } else {
        1.0 - regularized_incomplete_beta(a, a, 0.5 * (1.0 - h))?
    };
    Ok(F1Value { value, clamped })
}

/// Upper tail `1 − F_{1,β}(h)` without cancellation near `h = 1`.
pub fn cdf_f1_upper(beta: f64, h: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(Error::param(format!("F_1 needs β > −1, got {beta}")));
    }
    let h = h.clamp(-1.0, 1.0);
    let a = beta + 1.0;
    if h >= 0.0 {
        regularized_incomplete_beta(a, a, 0.5 * (1.0 - h))
    } else {
        regularized_incomplete_beta_upper(a, a, 0.5 * (1.0 + h))
    }
}

/// Density of `F_{1,β}`.
pub fn density_f1(beta: f64, h: f64) -> Result<f64> {
    let c = normalizer_1d(beta)?;
    Ok(if h.abs() < 1.0 { c * (1.0 - h * h).powf(beta) } else { 0.0 })
}

/// Inverse of [`cdf_f1`] by Newton steps safeguarded with bisection, to an
/// absolute accuracy of `1e-12` in `h`.
pub fn inverse_cdf_f1(beta: f64, p: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(Error::param(format!("F_1 needs β > −1, got {beta}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(-1.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let c = normalizer_1d(beta)?;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut h = 0.0;
    for _ in 0..200 {
        let f = cdf_f1(beta, h)?.value - p;
        if f == 0.0 {
            return Ok(h);
        }
        if f < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let dens = c * (1.0 - h * h).powf(beta);
        let mut next = h - f / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - h).abs() < 1e-13 || hi - lo < 1e-13 {
            return Ok(next);
        }
        h = next;
    }
    Err(Error::numerical(
        "inverse F_1",
        format!("no convergence for β={beta}, p={p}"),
    ))
}

/// Kolmogorov–Smirnov distance between the squared radius of `m` projected
/// samples and its predicted law.
///
/// Samples `X` from `p`, keeps the first `j` coordinates and compares
/// `‖X|L₀‖²` against `Beta(j/2, β + (n−j)/2 + 1)`, the squared-radius law of
/// the beta distribution with parameter `β + (n−j)/2` in `R^j`.
pub fn projection_law_check<R: Rng + ?Sized>(
    p: BetaParams,
    j: usize,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    if j == 0 || j > p.n {
        return Err(Error::param(format!("projection needs 1 ≤ j ≤ n, got n={}, j={j}", p.n)));
    }
    if m == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let radii: Vec<f64> = (0..m)
        .map(|_| p.sample(rng).rows(0, j).norm_squared())
        .collect();
    let a = 0.5 * j as f64;
    let b = p.beta + 0.5 * (p.n - j) as f64 + 1.0;
    if b == 0.0 {
        // Sphere law with nothing projected away: the squared radius is the
        // point mass at 1, and the distance is the mass found elsewhere.
        let off = radii.iter().filter(|&&s| s < 1.0 - 1e-12).count();
        return Ok(off as f64 / m as f64);
    }
    let err = std::cell::RefCell::new(None);
    let d = ks_statistic(&radii, |s| {
        beta_cdf(a, b, s).unwrap_or_else(|e| {
            *err.borrow_mut() = Some(e);
            0.0
        })
    });
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats::{ks_critical, ks_two_sample, ks_two_sample_critical, Accumulator};

    #[test]
    fn normalizer_closed_forms() {
        assert!((normalizer(BetaParams::new(1, 0.0).unwrap()).unwrap() - 0.5).abs() < 1e-15);
        assert!((normalizer(BetaParams::new(2, 0.0).unwrap()).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(normalizer(BetaParams::sphere(3).unwrap()).is_err());
        assert!(BetaParams::new(3, -1.5).is_err());
    }

    #[test]
    fn density_integrates_to_one() {
        // Hit-or-miss over the cube [−1, 1]³ for (n, β) = (3, 1).
        let p = BetaParams::new(3, 1.0).unwrap();
        let mut rng = stream(31);
        let acc: Accumulator = (0..200_000)
            .map(|_| {
                let x = Vector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
                8.0 * p.density(&x).unwrap()
            })
            .collect();
        assert!((acc.mean() - 1.0).abs() < 3.0 * acc.std_error(), "{:?}", acc.estimate());
    }

    #[test]
    fn uniform_disk_quarter_radius_fraction() {
        let p = BetaParams::new(2, 0.0).unwrap();
        let mut rng = stream(2);
        let m = 100_000;
        let hits = (0..m)
            .filter(|_| sample_beta(p, &mut rng).unwrap().norm() <= 0.5)
            .count();
        let frac = hits as f64 / m as f64;
        let sigma = (0.25 * 0.75 / m as f64).sqrt();
        assert!((frac - 0.25).abs() < 3.0 * sigma, "{frac}");
    }

    #[test]
    fn samples_stay_in_the_open_ball() {
        let mut rng = stream(4);
        for &(n, beta) in &[(1, -0.9), (2, 0.0), (5, 3.0), (3, -0.5)] {
            let p = BetaParams::new(n, beta).unwrap();
            for _ in 0..5_000 {
                assert!(sample_beta(p, &mut rng).unwrap().norm() < 1.0);
            }
        }
    }

    #[test]
    fn squared_radius_follows_its_beta_law() {
        let mut rng = stream(5);
        let m = 20_000;
        for &(n, beta) in &[(2, 0.0), (3, 1.5), (4, -0.7)] {
            let p = BetaParams::new(n, beta).unwrap();
            let s: Vec<f64> = (0..m).map(|_| sample_beta(p, &mut rng).unwrap().norm_squared()).collect();
            let d = ks_statistic(&s, |x| p.squared_radius_cdf(x).unwrap());
            assert!(d < ks_critical(m, 0.01), "n={n} β={beta} D={d}");
        }
    }

    #[test]
    fn sphere_samples() {
        let mut rng = stream(6);
        let m = 100_000;
        let mut mean = Vector::zeros(3);
        let mut cap = 0usize;
        for _ in 0..m {
            let x = sample_sphere(3, &mut rng);
            assert!((x.norm() - 1.0).abs() < 1e-12);
            if x[2] >= 0.5 {
                cap += 1;
            }
            mean += x;
        }
        mean /= m as f64;
        let sigma = (1.0 / 3.0 / m as f64).sqrt();
        assert!(mean.amax() < 3.0 * sigma, "{mean}");
        // Archimedes: the cap above height 1/2 has area fraction 1/4.
        let frac = cap as f64 / m as f64;
        assert!((frac - 0.25).abs() < 3.0 * (0.1875 / m as f64).sqrt(), "{frac}");
    }

    #[test]
    fn beta_law_is_rotation_invariant() {
        let p = BetaParams::new(3, 0.5).unwrap();
        let mut rng = stream(7);
        let q = crate::geom::haar_subspace(3, 3, &mut rng).unwrap().basis().clone();
        let u = Vector::from_vec(vec![0.6, 0.0, 0.8]);
        let m = 20_000;
        let a: Vec<f64> = (0..m).map(|_| sample_beta(p, &mut rng).unwrap().dot(&u)).collect();
        let b: Vec<f64> = (0..m)
            .map(|_| (&q * sample_beta(p, &mut rng).unwrap()).dot(&u))
            .collect();
        assert!(ks_two_sample(&a, &b) < ks_two_sample_critical(m, m, 0.01));
    }

    #[test]
    fn f1_symmetry_and_uniform_case() {
        for &beta in &[-0.9, -0.5, 0.0, 0.5, 3.0, 40.0] {
            assert!((cdf_f1(beta, 0.0).unwrap().value - 0.5).abs() < 1e-14);
        }
        for &h in &[-1.0, -0.6, 0.1, 0.75, 1.0] {
            assert!((cdf_f1(0.0, h).unwrap().value - (1.0 + h) / 2.0).abs() < 1e-14);
        }
        let v = cdf_f1(0.0, 1.5).unwrap();
        assert!(v.clamped && v.value == 1.0);
        assert!(!cdf_f1(0.0, 0.5).unwrap().clamped);
    }

    #[test]
    fn f1_upper_tail_is_complementary() {
        for &beta in &[-0.5, 0.0, 2.0] {
            for &h in &[-0.9, -0.2, 0.0, 0.4, 0.99] {
                let f = cdf_f1(beta, h).unwrap().value;
                let sum = f + cdf_f1_upper(beta, h).unwrap();
                assert!((sum - 1.0).abs() < 1e-14, "β={beta} h={h}: {sum}");
            }
        }
    }

    #[test]
    fn f1_round_trip_and_monotone() {
        // For large β the far tails are too flat to invert to 1e-10 in h from
        // a double-precision probability, so the grid stops at β = 2.
        for &beta in &[-0.8, -0.5, 0.0, 0.5, 2.0] {
            let mut prev = -1.0;
            for i in 1..200 {
                let h = -1.0 + 2.0 * i as f64 / 200.0;
                let f = cdf_f1(beta, h).unwrap().value;
                assert!(f > prev, "β={beta} not increasing at {h}");
                prev = f;
                let back = inverse_cdf_f1(beta, f).unwrap();
                assert!((back - h).abs() < 1e-10, "β={beta} h={h} back={back}");
            }
        }
    }

    #[test]
    fn f1_matches_its_density_by_quadrature() {
        for &beta in &[0.3, 1.0, 4.0] {
            let c = normalizer_1d(beta).unwrap();
            let q = crate::special::integrate(|x: f64| c * (1.0 - x * x).powf(beta), -1.0, 0.37, 1e-15, 1e-14)
                .unwrap();
            assert!((q - cdf_f1(beta, 0.37).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_the_sphere_is_archimedes_uniform() {
        let mut rng = stream(8);
        let m = 100_000;
        let d = projection_law_check(BetaParams::sphere(3).unwrap(), 1, m, &mut rng).unwrap();
        assert!(d < ks_critical(m, 0.01), "{d}");
    }

    #[test]
    fn projection_of_the_disk_is_a_semicircle_law() {
        let mut rng = stream(9);
        let m = 100_000;
        let d = projection_law_check(BetaParams::new(2, 0.0).unwrap(), 1, m, &mut rng).unwrap();
        assert!(d < ks_critical(m, 0.01), "{d}");
    }

    #[test]
    fn identity_projection_keeps_the_law() {
        let mut rng = stream(10);
        let m = 50_000;
        for p in [BetaParams::new(3, 0.5).unwrap(), BetaParams::sphere(4).unwrap()] {
            let d = projection_law_check(p, p.n, m, &mut rng).unwrap();
            assert!(d < ks_critical(m, 0.01), "{p:?}: {d}");
        }
        assert!(projection_law_check(BetaParams::new(2, 0.0).unwrap(), 3, 10, &mut rng).is_err());
    }
}
