//! Expected length of the one-dimensional beta polytope.

use crate::beta::{cdf_f1_upper, inverse_cdf_f1};
use crate::error::{Error, Result};
use crate::special::integrate;

const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_REL_TOL: f64 = 1e-12;

fn check(n_points: usize, beta: f64) -> Result<()> {
    if n_points == 0 {
        return Err(Error::param("need at least one point"));
    }
    if !(beta > -1.0) {
        return Err(Error::param(format!("need β > −1, got {beta}")));
    }
    Ok(())
}

/// `E vol_1([X_1, …, X_N])` for i.i.d. beta points on `[−1, 1]`.
///
/// By symmetry this is `2 E max X_i`. For `β = 0` the order statistics give
/// `2(N − 1)/(N + 1)`; otherwise see [`appendix_b_expectation_quadrature`].
pub fn appendix_b_expectation(n_points: usize, beta: f64) -> Result<f64> {
    check(n_points, beta)?;
    if beta == 0.0 {
        let n = n_points as f64;
        return Ok(2.0 * (n - 1.0) / (n + 1.0));
    }
    appendix_b_expectation_quadrature(n_points, beta)
}

/// Quadrature path, always used for `β ≠ 0`.
///
/// Writes `E max = 1 − ∫_{−1}^{1} F(x)^N dx` (integration by parts of the
/// order-statistic density), which keeps the integrand bounded for every
/// `β > −1`. For large `N` the integrand is a step of width about
/// `1 − F^{−1}(1 − 1/N)` at `x = 1`, so the integral runs in `s = 1 − x` over
/// geometrically shrinking pieces anchored at that width.
pub fn appendix_b_expectation_quadrature(n_points: usize, beta: f64) -> Result<f64> {
    check(n_points, beta)?;
    if n_points == 1 {
        return Ok(0.0);
    }
    let n = n_points as f64;
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| match cdf_f1_upper(beta, 1.0 - s) {
        Ok(tail) => (n * (-tail).ln_1p()).exp(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let width = 1.0 - inverse_cdf_f1(beta, 1.0 - 1.0 / n)?;
    let mut breaks = vec![2.0];
    let mut b = (64.0 * width).min(1.0);
    while b > 1e-6 * width {
        if b < breaks[breaks.len() - 1] {
            breaks.push(b);
        }
        b /= 4.0;
    }
    breaks.push(0.0);
    let mut integral = 0.0;
    for w in breaks.windows(2) {
        integral += integrate(integrand, w[1], w[0], QUAD_ABS_TOL, QUAD_REL_TOL)?;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 - 2.0 * integral)
}
