//! Scalar numeric kernels: error function, normal CDF, logit/logistic,
//! and the Wilson score interval.
//!
//! The error function is W. J. Cody's rational Chebyshev approximation
//! (the `calerf` scheme), accurate to a few ulps in double precision —
//! comfortably inside the 1e-12 absolute tolerance the rest of the crate
//! assumes for normal CDF values.

// Coefficients are transcribed verbatim from the reference tables.
#![allow(clippy::excessive_precision)]

/// 97.5% standard-normal quantile; the z used by every 95% Wilson interval.
pub const Z_95: f64 = 1.959963984540054;

const FRAC_1_SQRT_PI: f64 = 0.5641895835477563;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

// Cody region 1: |x| <= 0.46875, erf(x) = x * R(x^2).
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];

// Cody region 2: 0.46875 < |x| <= 4, erfc(x) = exp(-x^2) * R(x).
const ERF_C: [f64; 9] = [
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
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];

// Cody region 3: |x| > 4, erfc(x) = exp(-x^2)/x * (1/sqrt(pi) - R(1/x^2)).
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// erfc(y) for y in Cody's middle region (0.46875, 4.0].
fn erfc_mid(y: f64) -> f64 {
    let mut num = ERF_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERF_C[i]) * y;
        den = (den + ERF_D[i]) * y;
    }
    let r = (num + ERF_C[7]) / (den + ERF_D[7]);
    scaled_exp(y) * r
}

/// erfc(y) for y in Cody's far region (> 4.0).
fn erfc_far(y: f64) -> f64 {
    if y >= 26.6 {
        // Underflows double precision.
        return 0.0;
    }
    let inv_sq = 1.0 / (y * y);
    let mut num = ERF_P[5] * inv_sq;
    let mut den = inv_sq;
    for i in 0..4 {
        num = (num + ERF_P[i]) * inv_sq;
        den = (den + ERF_Q[i]) * inv_sq;
    }
    let r = inv_sq * (num + ERF_P[4]) / (den + ERF_Q[4]);
    scaled_exp(y) * (FRAC_1_SQRT_PI - r) / y
}

/// exp(-y^2) computed as exp(-hi^2)*exp(-(y-hi)(y+hi)) with hi a 1/16
/// truncation of y, Cody's trick for avoiding cancellation in the exponent.
fn scaled_exp(y: f64) -> f64 {
    let hi = (y * 16.0).trunc() / 16.0;
    let del = (y - hi) * (y + hi);
    (-hi * hi).exp() * (-del).exp()
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = ERF_A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + ERF_A[i]) * ysq;
            den = (den + ERF_B[i]) * ysq;
        }
        return x * (num + ERF_A[3]) / (den + ERF_B[3]);
    }
    let res = 1.0 - if y <= 4.0 { erfc_mid(y) } else { erfc_far(y) };
    if x < 0.0 {
        -res
    } else {
        res
    }
}

/// The complementary error function, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let res = if y <= 0.46875 {
        return 1.0 - erf(x);
    } else if y <= 4.0 {
        erfc_mid(y)
    } else {
        erfc_far(y)
    };
    if x < 0.0 {
        2.0 - res
    } else {
        res
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// log(p / (1 - p)); caller guarantees p in (0, 1).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// 1 / (1 + exp(-x)), the logit inverse.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// 95% Wilson score interval for `positives` successes out of `count`
/// trials. Bounds are clamped to [0, 1]. `count` must be nonzero.
pub fn wilson_interval(positives: u64, count: u64) -> (f64, f64) {
    debug_assert!(count > 0 && positives <= count);
    let n = count as f64;
    let p_hat = positives as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let margin = Z_95 * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    // At the boundaries the interval reaches 0 and 1 exactly in real
    // arithmetic; pin them so rounding cannot push p_hat outside.
    let lo = if positives == 0 {
        0.0
    } else {
        ((center - margin) / denom).max(0.0)
    };
    let hi = if positives == count {
        1.0
    } else {
        ((center + margin) / denom).min(1.0)
    };
    (lo, hi)
}
