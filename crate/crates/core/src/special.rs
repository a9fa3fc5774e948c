//! Gamma-family special functions, unit-ball measures and adaptive quadrature.
//!
//! Everything gamma-heavy is evaluated in log space so that dimensions of a
//! few hundred stay finite.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `Γ(x + s) / Γ(x)` evaluated through log-gamma.
pub fn gamma_ratio(x: f64, s: f64) -> f64 {
    (ln_gamma(x + s) - ln_gamma(x)).exp()
}

/// `ln vol_n(B_n) = (n/2) ln π − ln Γ(1 + n/2)`.
pub fn ln_ball_volume(n: f64) -> f64 {
    0.5 * n * PI.ln() - ln_gamma(1.0 + 0.5 * n)
}

/// Volume of the `n`-dimensional unit ball (κ_n); `κ_0 = 1`.
pub fn ball_volume(n: usize) -> f64 {
    ln_ball_volume(n as f64).exp()
}

/// `ln ω_n` where `ω_n = 2π^{n/2}/Γ(n/2)` is the surface area of `S^{n−1}`.
pub fn ln_sphere_area(n: usize) -> f64 {
    let n = n as f64;
    std::f64::consts::LN_2 + 0.5 * n * PI.ln() - ln_gamma(0.5 * n)
}

/// Surface area ω_n of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    ln_sphere_area(n).exp()
}

/// `ln ω̄_p = Σ_{k=1}^{p} ln ω_k`, with the empty product for `p = 0`.
pub fn ln_sphere_area_product(p: usize) -> f64 {
    (1..=p).map(ln_sphere_area).sum()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;
const MAX_CF_ITERATIONS: usize = 20_000;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_CF_ITERATIONS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::numerical(
        "incomplete beta continued fraction",
        format!("no convergence for a={a}, b={b}, x={x}"),
    ))
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// The continued fraction is evaluated on whichever side of the mean
/// `(a+1)/(a+b+2)` converges fastest.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::param(format!(
            "incomplete beta needs a, b > 0 (got a={a}, b={b})"
        )));
    }
    if x.is_nan() {
        return Err(Error::param("incomplete beta at NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * beta_continued_fraction(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        let tail = ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x)? / b;
        Ok((1.0 - tail).clamp(0.0, 1.0))
    }
}

/// Upper tail `1 − I_x(a, b)` computed without cancellation.
pub fn regularized_incomplete_beta_upper(a: f64, b: f64, x: f64) -> Result<f64> {
    regularized_incomplete_beta(b, a, 1.0 - x)
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (G7/K15) quadrature of `f` over `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MAX_INTERVALS: usize = 4_000;
    let (v, e) = gauss_kronrod_15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::numerical(
                "adaptive quadrature",
                format!("error estimate {err:.3e} after {MAX_INTERVALS} intervals on [{a}, {b}]"),
            ));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod_15(&f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
