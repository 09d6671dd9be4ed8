//! Quadrature rules on the uniform periodic grid `theta_j = 2 pi j / M`.
//!
//! The singular rules are product rules: the weight of node `j` seen from
//! node `i` depends only on `(i - j) mod M`, so each rule is one vector.

use crate::special::{gamma_fn, ln_gamma_fn};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Weights `R[d]` with `int_0^{2pi} ln|2 sin((t_i - t)/2)| psi(t) dt
/// = sum_j R[(i - j) mod M] psi(t_j)`, exact for trigonometric polynomials
/// of degree below `M/2`.
pub fn log_weights(m: usize) -> Vec<f64> {
    assert!(m >= 4 && m % 2 == 0, "log weights need an even grid of at least 4 nodes");
    let n = m / 2;
    (0..m)
        .map(|d| {
            let t = 2.0 * PI * d as f64 / m as f64;
            let mut s = 0.0;
            for k in 1..n {
                s += (k as f64 * t).cos() / k as f64;
            }
            s += (n as f64 * t).cos() / (2.0 * n as f64);
            -2.0 * PI / m as f64 * s
        })
        .collect()
}

/// Cosine moments `mu_k = int_0^{2pi} |2 sin(s/2)|^-beta cos(k s) ds`, `k = 0..=n`.
///
/// Closed form `mu_k = 2 Gamma(1-beta) sin(pi beta/2) Gamma(k+beta/2) / Gamma(k+1-beta/2)`,
/// evaluated by its ratio recurrence.
pub fn power_moments(beta: f64, n: usize) -> Vec<f64> {
    assert!(beta > 0.0 && beta < 1.0, "power moments need beta in (0, 1)");
    let h = 0.5 * beta;
    let mu0 = 2.0 * gamma_fn(1.0 - beta) * (PI * h).sin() * (ln_gamma_fn(h) - ln_gamma_fn(1.0 - h)).exp();
    let mut out = Vec::with_capacity(n + 1);
    let mut v = mu0;
    for k in 0..=n {
        out.push(v);
        v *= (k as f64 + h) / (k as f64 + 1.0 - h);
    }
    out
}

/// Weights `P[d]` with `int_0^{2pi} |2 sin((t_i - t)/2)|^-beta psi(t) dt
/// = sum_j P[(i - j) mod M] psi(t_j)`, exact for trigonometric polynomials
/// of degree below `M/2`.
pub fn power_weights(beta: f64, m: usize) -> Vec<f64> {
    assert!(m >= 4 && m % 2 == 0, "power weights need an even grid of at least 4 nodes");
    let n = m / 2;
    let mu = power_moments(beta, n);
    (0..m)
        .map(|d| {
            let t = 2.0 * PI * d as f64 / m as f64;
            let mut s = mu[0];
            for k in 1..n {
                s += 2.0 * mu[k] * (k as f64 * t).cos();
            }
            s += mu[n] * (n as f64 * t).cos();
            s / m as f64
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Derivative `dz/dtheta` of uniformly sampled periodic data, by FFT.
///
/// The Nyquist mode is dropped, so real-valued curves keep real derivatives.
pub fn spectral_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if k < m / 2 {
            k as f64
        } else if k == m / 2 && m % 2 == 0 {
            0.0
        } else {
            k as f64 - m as f64
        };
        *c *= Complex64::new(0.0, freq / m as f64);
    }
    inv.process(&mut buf);
    buf
}

/// Trigonometric interpolation of uniformly sampled periodic data onto a grid
/// `factor` times finer; the original samples are reproduced exactly.
pub fn spectral_upsample(values: &[Complex64], factor: usize) -> Vec<Complex64> {
    let m = values.len();
    let big = m * factor;
    let mut planner = FftPlanner::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(m).process(&mut buf);
    let mut wide = vec![Complex64::new(0.0, 0.0); big];
    for (k, c) in buf.iter().enumerate() {
        let scaled = c / m as f64;
        if k < m / 2 {
            wide[k] = scaled;
        } else if k == m / 2 && m % 2 == 0 {
            // split the Nyquist mode symmetrically
            wide[k] = 0.5 * scaled;
            wide[big - m / 2] = 0.5 * scaled;
        } else {
            wide[big - (m - k)] = scaled;
        }
    }
    planner.plan_fft_inverse(big).process(&mut wide);
    wide
}

/// Adaptive Gauss-Kronrod (7-15) integration of a smooth function on `[a, b]`.
///
/// Used for reference values and self-checks, never in hot loops.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn gk(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        const XK: [f64; 8] = [
            0.991455371120812639206854697526329,
            0.949107912342758524526189684047851,
            0.864864423359769072789712788640926,
            0.741531185599394439863864773280788,
            0.586087235467691130294144845693013,
            0.405845151377397166906606412076961,
            0.207784955007898467600689403773245,
            0.0,
        ];
        const WK: [f64; 8] = [
            0.022935322010529224963732008058970,
            0.063092092629978553290700663189204,
            0.104790010322250183839876322541518,
            0.140653259715525918745189590510238,
            0.169004726639267902826583426598550,
            0.190350578064785409913256402421014,
            0.204432940075298892414161999234649,
            0.209482141084727828012999174891714,
        ];
        const WG: [f64; 4] = [
            0.129484966168869693270611432679082,
            0.279705391489276667901467771423780,
            0.381830050505118944950369775488975,
            0.417959183673469387755102040816327,
        ];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut k = WK[7] * f(c);
        let mut g = WG[3] * f(c);
        for j in 0..7 {
            let (f1, f2) = (f(c - h * XK[j]), f(c + h * XK[j]));
            k += WK[j] * (f1 + f2);
            if j % 2 == 1 {
                g += WG[j / 2] * (f1 + f2);
            }
        }
        (k * h, ((k - g) * h).abs())
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (v, err) = gk(f, a, b);
        if err <= tol || depth > 60 {
            return v;
        }
        let c = 0.5 * (a + b);
        rec(f, a, c, 0.5 * tol, depth + 1) + rec(f, c, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_weights_integrate_modes_exactly() {
        // int ln|2 sin(s/2)| cos(k s) ds = -pi/k, and 0 for k = 0
        let m = 32;
        let r = log_weights(m);
        for k in 0..m / 2 {
            let sum: f64 = (0..m).map(|d| r[d] * (k as f64 * 2.0 * PI * d as f64 / m as f64).cos()).sum();
            let want = if k == 0 { 0.0 } else { -PI / k as f64 };
            assert!((sum - want).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn power_moments_match_adaptive_quadrature() {
        for &beta in &[0.2, 0.5, 0.8] {
            let mu = power_moments(beta, 6);
            for (k, &v) in mu.iter().enumerate() {
                // s = t^p removes the endpoint singularity; the integrand is symmetric about pi
                let p = 1.0 / (1.0 - beta) + 1.0;
                let g = |t: f64| {
                    let s = t.powf(p);
                    let ds = p * t.powf(p - 1.0);
                    (2.0 * (0.5 * s).sin()).powf(-beta) * (k as f64 * s).cos() * ds
                };
                let half = adaptive_integrate(&g, 0.0, PI.powf(1.0 / p), 1e-14);
                assert!((2.0 * half - v).abs() < 1e-11 * v.abs().max(1e-3), "beta {beta} k {k}: {v} vs {}", 2.0 * half);
            }
        }
    }

    #[test]
    fn power_weights_integrate_modes_exactly() {
        let m = 24;
        let beta = 0.5;
        let p = power_weights(beta, m);
        let mu = power_moments(beta, m / 2);
        for k in 0..m / 2 {
            let sum: f64 = (0..m).map(|d| p[d] * (k as f64 * 2.0 * PI * d as f64 / m as f64).cos()).sum();
            assert!((sum - mu[k]).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        for deg in 0..24 {
            let sum: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((sum - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn spectral_derivative_of_trig_polynomial() {
        let m = 32;
        let vals: Vec<Complex64> = (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                Complex64::new((3.0 * t).cos(), (5.0 * t).sin())
            })
            .collect();
        let d = spectral_derivative(&vals);
        for (j, v) in d.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / m as f64;
            let want = Complex64::new(-3.0 * (3.0 * t).sin(), 5.0 * (5.0 * t).cos());
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn upsampling_interpolates_trig_polynomials() {
        let m = 16;
        let f = |t: f64| Complex64::new((2.0 * t).cos(), (3.0 * t).sin() + 0.5);
        let vals: Vec<Complex64> = (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect();
        let up = spectral_upsample(&vals, 4);
        for (j, v) in up.iter().enumerate() {
            assert!((v - f(2.0 * PI * j as f64 / (4 * m) as f64)).norm() < 1e-13);
        }
    }

    #[test]
    fn adaptive_integration_of_smooth_function() {
        let v = adaptive_integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
