//! Modified Bessel functions `K0`, `K1`, `I0`, `I1` of real positive argument.
//!
//! Three regimes:
//!
//! * `x <= 2`: ascending series with the digamma sums
//!   `phi(k+1) = H_k - gamma`, summed until the relative increment drops
//!   below 1e-17 (at most 40 terms);
//! * `2 < x < 25`: Steed's evaluation of the Temme continued fraction for
//!   the confluent function behind the Hankel expansion;
//! * `x >= 25`: the Hankel asymptotic expansion with its correction series,
//!   truncated at its smallest term.
//!
//! Results whose magnitude falls below `f64::MIN_POSITIVE` are reported as
//! zero with the underflow flag set.

use crate::error::{Error, Result};
use crate::special::EULER_GAMMA;
use std::f64::consts::PI;

/// Upper end of the ascending-series regime.
pub const SERIES_LIMIT: f64 = 2.0;
/// Lower end of the asymptotic regime.
pub const ASYMPTOTIC_LIMIT: f64 = 25.0;

const SERIES_MAX_TERMS: usize = 40;
const SERIES_REL_TOL: f64 = 1e-17;

/// A Bessel value with an underflow indicator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselValue {
    pub value: f64,
    /// Set when the true value is below the smallest normal double.
    pub underflow: bool,
}

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("modified Bessel K needs a finite x > 0, got {x}")));
    }
    Ok(())
}

fn flagged(v: f64) -> BesselValue {
    if v < f64::MIN_POSITIVE {
        BesselValue { value: 0.0, underflow: true }
    } else {
        BesselValue { value: v, underflow: false }
    }
}

/// `K0(x)` with relative error below 1e-12 on `[1e-8, 700]`.
pub fn bessel_k0(x: f64) -> Result<BesselValue> {
    check_arg(x)?;
    Ok(flagged(k0(x)))
}

/// `K1(x)` with relative error below 1e-12 on `[1e-8, 700]`.
pub fn bessel_k1(x: f64) -> Result<BesselValue> {
    check_arg(x)?;
    Ok(flagged(k1(x)))
}

/// Unchecked `K0` for hot loops; `x > 0` is the caller's responsibility.
pub fn k0(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k0_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        k01_continued_fraction(x).0
    } else {
        k_asymptotic(0.0, x)
    }
}

/// Unchecked `K1`.
pub fn k1(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        k1_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        k01_continued_fraction(x).1
    } else {
        k_asymptotic(1.0, x)
    }
}

/// `I0(x)` by its ascending series; intended for moderate `x` (below ~50).
pub fn i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// `I1(x)` by its ascending series; intended for moderate `x`.
pub fn i1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// Series part `P(x) = sum_k (x/2)^(2k) / (k!)^2 * phi(k+1)`, so that
/// `K0(x) = -ln(x/2) I0(x) + P(x)`. Entire and even in `x`.
pub fn k0_series_regular_part(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut phi = -EULER_GAMMA;
    let mut sum = phi;
    for k in 1..=4 * SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        phi += 1.0 / kf;
        let add = term * phi;
        sum += add;
        if add.abs() < SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    sum
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    let mut term = 1.0;
    let mut phi = -EULER_GAMMA;
    let mut sum = -lg + phi;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        phi += 1.0 / kf;
        let add = term * (phi - lg);
        sum += add;
        if add.abs() < SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    sum
}

fn k1_series(x: f64) -> f64 {
    // K1 = 1/x + ln(x/2) I1(x) - (x/4) sum_k (x^2/4)^k / (k!(k+1)!) (psi(k+1) + psi(k+2))
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    let mut term = 1.0; // (x^2/4)^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // psi(k+1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut sum = term * (2.0 * lg - psi_k1 - psi_k2);
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        let add = term * (2.0 * lg - psi_k1 - psi_k2);
        sum += add;
        if add.abs() < SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    1.0 / x + 0.25 * x * sum
}

/// Steed's algorithm for Temme's continued fraction; returns `(K0, K1)`.
fn k01_continued_fraction(x: f64) -> (f64, f64) {
    let a1 = 0.25; // 1/4 - nu^2 at nu = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Hankel expansion `sqrt(pi/2x) e^-x sum_k a_k(nu) / x^k`, stopped at the
/// smallest term. Evaluated in log space so the prefactor never underflows
/// before the correction series is applied.
fn k_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (0.5 * (PI / (2.0 * x)).ln() - x + sum.ln()).exp()
}

/// Regular part `g0` of `K0(x) = -ln x + g0(x) + g1` with `g1 = ln 2 - gamma`.
///
/// `g0(x) = O(x^2 ln x)` near the origin. Valid for `0 < x <= 1`; beyond
/// that callers should evaluate [`bessel_k0`] directly.
pub fn qgsw_smooth_part(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x > 1.0 {
        return Err(Error::Range(format!(
            "qgsw_smooth_part series is restricted to x <= 1 (got {x}); use bessel_k0"
        )));
    }
    // g0 = -ln(x/2) (I0 - 1) + sum_{k>=1} (x/2)^(2k) / (k!)^2 phi(k+1)
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    let mut term = 1.0;
    let mut phi = -EULER_GAMMA;
    let mut sum = 0.0;
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        phi += 1.0 / kf;
        let add = term * (phi - lg);
        sum += add;
        if add.abs() <= SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// The constant `g1 = ln 2 - gamma` of the `K0` splitting.
pub const QGSW_G1: f64 = std::f64::consts::LN_2 - EULER_GAMMA;

/// `K_m(x)` for `m = 0..=m_max` by upward recurrence (stable for `K`).
pub fn k_sequence(x: f64, m_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(k0(x));
    if m_max >= 1 {
        out.push(k1(x));
    }
    for m in 1..m_max {
        let next = out[m - 1] + 2.0 * m as f64 / x * out[m];
        out.push(next);
    }
    out
}
