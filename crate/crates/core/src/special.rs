//! Scalar special functions not covered by the Bessel module.

use statrs::function::gamma::{gamma, ln_gamma};

/// Euler's constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Gamma function for real arguments (Lanczos, ~15 digits).
pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma_fn(x: f64) -> f64 {
    ln_gamma(x)
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `sum_{j>=0} (a + j)^-s` for `s > 1`, `a > 0`.
///
/// Euler-Maclaurin with the direct part long enough that the Bernoulli
/// corrections decay geometrically; relative accuracy is near machine precision.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    let shift = 12 + s.ceil() as usize;
    let mut direct = 0.0;
    for j in (0..shift).rev() {
        direct += (a + j as f64).powf(-s);
    }
    let x = a + shift as f64;
    let xs = x.powf(-s);
    let mut tail = x * xs / (s - 1.0) + 0.5 * xs;
    // rising factorial s (s+1) ... (s+2k-2) times x^(-s-2k+1) / (2k)!
    let mut term = s * xs / x;
    let mut fact = 2.0;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let add = b * term / fact;
        tail += add;
        if add.abs() < 1e-18 * tail.abs() {
            break;
        }
        let k2 = 2.0 * (k as f64 + 1.0);
        term *= (s + k2 - 1.0) * (s + k2) / (x * x);
        fact *= (k2 + 1.0) * (k2 + 2.0);
    }
    direct + tail
}

/// Pochhammer ratios `(b)_p / p!` for `p = 0..=n`.
pub fn pochhammer_over_factorial(b: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    for p in 0..=n {
        out.push(v);
        v *= (b + p as f64) / (p as f64 + 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let z = hurwitz_zeta(2.0, 1.0);
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_shift_identity() {
        // zeta(s, a) = a^-s + zeta(s, a + 1)
        for &s in &[1.5, 2.5, 7.25, 40.5] {
            for &a in &[0.3, 1.0, 4.0, 17.0] {
                let lhs = hurwitz_zeta(s, a);
                let rhs = a.powf(-s) + hurwitz_zeta(s, a + 1.0);
                assert!((lhs - rhs).abs() <= 1e-14 * lhs, "s={s} a={a}");
            }
        }
    }

    #[test]
    fn zeta_matches_brute_force_sum() {
        let s = 3.5;
        let a = 2.0;
        let mut brute = 0.0;
        for j in (0..200_000).rev() {
            brute += (a + j as f64).powf(-s);
        }
        // remaining tail of a p-series beyond 2e5 is below 1e-13
        assert!((hurwitz_zeta(s, a) - brute).abs() < 1e-12);
    }
}
