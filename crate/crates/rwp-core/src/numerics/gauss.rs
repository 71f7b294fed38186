//! Gaussian tail function Q and its inverse.
//!
//! Q(x) = ∫_x^∞ φ(u) du is evaluated as erfc(x/√2)/2 using W. J. Cody's
//! rational Chebyshev approximations for the error function (the SPECFUN
//! `calerf` coefficients), accurate to a few ulps in double precision.

// The approximation tables keep their published digits.
#![allow(clippy::excessive_precision)]

use super::NumericsError;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

// Coefficients for erf on |x| <= 0.46875.
const A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];

// Coefficients for erfc on 0.46875 < x <= 4.
const C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];

// Coefficients for erfc on x > 4.
const P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

const ONE_OVER_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// erfc(y) for y >= 0.
fn erfc_nonneg(y: f64) -> f64 {
    if y <= 0.46875 {
        let z = y * y;
        let mut xnum = A[4] * z;
        let mut xden = z;
        for i in 0..3 {
            xnum = (xnum + A[i]) * z;
            xden = (xden + B[i]) * z;
        }
        return 1.0 - y * (xnum + A[3]) / (xden + B[3]);
    }
    if y > 26.6 {
        // exp(-y^2) underflows: erfc rounds to zero.
        return 0.0;
    }
    let raw = if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        (xnum + C[7]) / (xden + D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut xnum = P[5] * z;
        let mut xden = z;
        for i in 0..4 {
            xnum = (xnum + P[i]) * z;
            xden = (xden + Q[i]) * z;
        }
        let r = z * (xnum + P[4]) / (xden + Q[4]);
        (ONE_OVER_SQRT_PI - r) / y
    };
    // exp(-y^2) split to preserve accuracy for large y.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * raw
}

fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        erfc_nonneg(x)
    } else {
        2.0 - erfc_nonneg(-x)
    }
}

/// Q(x) without input validation; callers guarantee a finite argument.
#[inline]
pub(crate) fn q_raw(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Gaussian tail probability Q(x) = P(Z > x) for a standard normal Z.
///
/// Absolute error is below 1e-15 over the whole real line.
pub fn q_function(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(format!(
            "q_function requires a finite argument, got {x}"
        )));
    }
    Ok(q_raw(x))
}

/// Standard normal density.
#[inline]
fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of [`q_function`] on (0, 1), via bracketing plus Newton refinement.
///
/// The result satisfies `|q_function(x) - p| <= 1e-12`.
pub fn q_inverse(p: f64) -> Result<f64, NumericsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericsError::Domain(format!(
            "q_inverse requires p in (0, 1), got {p}"
        )));
    }
    if p > 0.5 {
        return Ok(-q_inverse(1.0 - p)?);
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Q is strictly decreasing; bracket the root in [lo, hi].
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while q_raw(hi) > p && hi < 40.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = q_raw(x) - p;
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if f.abs() <= 1e-14 || hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        let dq = phi(x);
        // Newton step (Q' = -phi), falling back to bisection when it leaves
        // the bracket or the derivative degenerates.
        let step_ok = dq > f64::MIN_POSITIVE;
        let candidate = if step_ok { x + f / dq } else { f64::NAN };
        x = if step_ok && candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}
