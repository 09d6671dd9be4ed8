//! Horizontally periodized kernels `sum_k G(|z - k l|)`.
//!
//! Two sums are exposed, both as functions of a complex offset `z`:
//!
//! * [`LatticeKernel::regular`]: the images `k != 0` only, smooth near `z = 0`;
//! * [`LatticeKernel::full`]: every image, singular at the lattice points.
//!
//! Both are defined up to an additive constant (the symmetric sum of a
//! log or power kernel diverges otherwise). Every consumer integrates them
//! against a closed-contour differential `dxi`, which annihilates constants.
//!
//! Euler sums are closed forms in `ln|sin|`. QGSW and gSQG sums add the near
//! images `|k| <= K` directly and expand the far images `|k| > K` in a polar
//! series around the origin whose coefficients are tabulated once per
//! `(kernel, l)`: `tail(z) = sum_n r^n sum_m T[n][m] cos(m psi)`, `z = r e^{i psi}`,
//! with `n`, `m` even.

use crate::kernels::{bessel, KernelKind, RadialKernel};
use crate::special::{hurwitz_zeta, ln_gamma_fn, pochhammer_over_factorial};
use num_complex::Complex64;
use std::f64::consts::PI;

const INV_2PI: f64 = 0.5 / PI;
/// Near-image half-widths with a tabulated tail.
const TAIL_WIDTHS: [usize; 5] = [0, 2, 6, 16, 48];
/// Tail series is used while `r <= MAX_RATIO * (K + 1) l`.
const MAX_RATIO: f64 = 0.25;
const MAX_ORDER: usize = 80;
/// QGSW rows further than this (in units of `l`) use the spectral form.
const SPECTRAL_HEIGHT: f64 = 0.15;

#[derive(Clone, Debug)]
struct TailTable {
    width: usize,
    /// `coeffs[n/2][m/2]` multiplies `r^n cos(m psi)`.
    coeffs: Vec<Vec<f64>>,
    /// `sum_m |coeffs[n/2][m/2]|`, used for truncation.
    norms: Vec<f64>,
}

/// Periodized kernel for a fixed radial kernel and period `l`.
#[derive(Clone, Debug)]
pub struct LatticeKernel {
    kernel: RadialKernel,
    l: f64,
    tables: Vec<TailTable>,
    abs_tol: f64,
}

impl LatticeKernel {
    pub fn new(kernel: RadialKernel, l: f64) -> Self {
        assert!(l > 0.0 && l.is_finite(), "lattice period must be positive");
        let (tables, abs_tol) = match kernel.kind() {
            KernelKind::EulerLog => (Vec::new(), 0.0),
            KernelKind::GsqgPower => {
                let tables = TAIL_WIDTHS.iter().map(|&k| gsqg_table(&kernel, l, k)).collect();
                (tables, 1e-17 * kernel.prefactor() * l.powf(-kernel.beta()))
            }
            KernelKind::QgswBessel => {
                let tables = TAIL_WIDTHS.iter().map(|&k| qgsw_table(kernel.lambda(), l, k)).collect();
                (tables, 1e-17 * INV_2PI)
            }
        };
        LatticeKernel { kernel, l, tables, abs_tol }
    }

    pub fn kernel(&self) -> &RadialKernel {
        &self.kernel
    }

    pub fn period(&self) -> f64 {
        self.l
    }

    /// `sum_{k != 0} G(|z - k l|)`, up to a constant.
    pub fn regular(&self, z: Complex64) -> f64 {
        match self.kernel.kind() {
            KernelKind::EulerLog => INV_2PI * ln_abs_sinc(z * (PI / self.l)),
            _ => self.images(z),
        }
    }

    /// `sum_k G(|z - k l|)`, up to a constant. Singular at `z = k l`.
    pub fn full(&self, z: Complex64) -> f64 {
        let z = self.reduce(z);
        match self.kernel.kind() {
            KernelKind::EulerLog => INV_2PI * ln_abs_sin(z * (PI / self.l)),
            KernelKind::QgswBessel if z.im.abs() >= SPECTRAL_HEIGHT * self.l => self.qgsw_spectral(z),
            _ => self.kernel.g(z.norm()) + self.images(z),
        }
    }

    /// Shifts `Re z` into `[-l/2, l/2)`.
    fn reduce(&self, z: Complex64) -> Complex64 {
        let shift = (z.re / self.l).round();
        Complex64::new(z.re - shift * self.l, z.im)
    }

    /// Near images `1 <= |k| <= K` plus the tabulated far images.
    fn images(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let table = self.tables.iter().find(|t| r <= MAX_RATIO * (t.width as f64 + 1.0) * self.l);
        match table {
            Some(t) => self.near(z, t.width) + self.tail(z, t),
            None => {
                // beyond every table: build one on demand
                let width = (r / (MAX_RATIO * self.l)).ceil() as usize;
                let t = match self.kernel.kind() {
                    KernelKind::GsqgPower => gsqg_table(&self.kernel, self.l, width),
                    _ => qgsw_table(self.kernel.lambda(), self.l, width),
                };
                self.near(z, width) + self.tail(z, &t)
            }
        }
    }

    fn near(&self, z: Complex64, width: usize) -> f64 {
        let power = self.kernel.kind() == KernelKind::GsqgPower;
        let mut acc = 0.0;
        for k in 1..=width {
            let kl = k as f64 * self.l;
            let pair = self.kernel.g((z - kl).norm()) + self.kernel.g((z + kl).norm());
            acc += if power { pair - 2.0 * self.kernel.g(kl) } else { pair };
        }
        acc
    }

    fn tail(&self, z: Complex64, t: &TailTable) -> f64 {
        let r = z.norm();
        if r == 0.0 {
            return t.coeffs[0][0];
        }
        let u2 = (z / r) * (z / r);
        let mut cos_m = Vec::with_capacity(t.coeffs.len());
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..t.coeffs.len() {
            cos_m.push(p.re);
            p *= u2;
        }
        let r2 = r * r;
        let mut rn = 1.0;
        let mut acc = 0.0;
        for (j, row) in t.coeffs.iter().enumerate() {
            if j > 0 && rn * t.norms[j] < self.abs_tol {
                break;
            }
            let mut s = 0.0;
            for (i, c) in row.iter().enumerate() {
                s += c * cos_m[i];
            }
            acc += rn * s;
            rn *= r2;
        }
        acc
    }

    /// Fourier-in-`x` form of the full QGSW sum, valid for `|Im z| > 0`.
    fn qgsw_spectral(&self, z: Complex64) -> f64 {
        let lambda = self.kernel.lambda();
        let y = z.im.abs();
        let mut acc = (-lambda * y).exp() / lambda;
        let step = 2.0 * PI / self.l;
        let (s1, c1) = (step * z.re).sin_cos();
        let (mut s, mut c) = (s1, c1);
        for m in 1..10_000 {
            let km = ((step * m as f64).powi(2) + lambda * lambda).sqrt();
            let term = 2.0 * (-km * y).exp() / km;
            acc += term * c;
            if term < 1e-18 * acc.abs() {
                break;
            }
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
        }
        -acc / (2.0 * self.l)
    }
}

/// `ln|sin z|`, stable for large `|Im z|`.
pub fn ln_abs_sin(z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im.abs());
    if y > 1.0 {
        let e = (-2.0 * y).exp();
        y - std::f64::consts::LN_2 + 0.5 * (-2.0 * (2.0 * x).cos() * e + e * e).ln_1p()
    } else {
        let s = x.sin();
        let sh = y.sinh();
        0.5 * (s * s + sh * sh).ln()
    }
}

/// `ln|sin z / z|`, accurate near `z = 0` where it behaves like `-Re(z^2)/6`.
pub fn ln_abs_sinc(z: Complex64) -> f64 {
    let a = z.norm();
    if a == 0.0 {
        return 0.0;
    }
    if a < 0.5 {
        // sin z / z - 1 = sum_k (-1)^k z^{2k} / (2k+1)!
        let z2 = z * z;
        let mut term = Complex64::new(1.0, 0.0);
        let mut delta = Complex64::new(0.0, 0.0);
        for k in 1..20 {
            let kf = k as f64;
            term *= -z2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            delta += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        0.5 * (2.0 * delta.re + delta.norm_sqr()).ln_1p()
    } else {
        ln_abs_sin(z) - a.ln()
    }
}

fn gsqg_table(kernel: &RadialKernel, l: f64, width: usize) -> TailTable {
    let beta = kernel.beta();
    let c = kernel.prefactor();
    let e = pochhammer_over_factorial(0.5 * beta, MAX_ORDER);
    let a = width as f64 + 1.0;
    let mut coeffs = Vec::new();
    let mut norms = Vec::new();
    for n in (0..=MAX_ORDER).step_by(2) {
        let mut row = Vec::with_capacity(n / 2 + 1);
        if n == 0 {
            // the n = 0 term cancels against the subtracted G(|k| l)
            row.push(0.0);
        } else {
            let scale = 2.0 * c * l.powf(-beta - n as f64) * hurwitz_zeta(beta + n as f64, a);
            for m in (0..=n).step_by(2) {
                let (p, q) = ((n + m) / 2, (n - m) / 2);
                let w = if m == 0 { e[p] * e[q] } else { 2.0 * e[p] * e[q] };
                row.push(scale * w);
            }
        }
        norms.push(row.iter().map(|v: &f64| v.abs()).sum());
        coeffs.push(row);
    }
    TailTable { width, coeffs, norms }
}

/// QGSW far-image table from Graf's addition theorem:
/// `K0(lambda |z - k l|) = sum_m K_m(lambda k l) I_m(lambda r) cos(m psi)` over
/// signed `m`, with the pair `k, -k` keeping even `m` only.
fn qgsw_table(lambda: f64, l: f64, width: usize) -> TailTable {
    let ln_s = qgsw_image_sums(lambda, l, width);
    let ln_half_lambda = (0.5 * lambda).ln();
    let mut coeffs = Vec::new();
    let mut norms = Vec::new();
    for n in (0..=MAX_ORDER).step_by(2) {
        let mut row = Vec::with_capacity(n / 2 + 1);
        for m in (0..=n).step_by(2) {
            let w = if m == 0 { 2.0 } else { 4.0 };
            let (p, q) = ((n + m) / 2, (n - m) / 2);
            let ln_mag = ln_s[m] + n as f64 * ln_half_lambda - ln_gamma_fn(p as f64 + 1.0) - ln_gamma_fn(q as f64 + 1.0);
            let v = -INV_2PI * w * ln_mag.exp();
            row.push(if v.is_finite() { v } else { 0.0 });
        }
        norms.push(row.iter().map(|v: &f64| v.abs()).sum());
        coeffs.push(row);
    }
    TailTable { width, coeffs, norms }
}

/// `ln sum_{k > K} K_m(lambda k l)` for `m = 0..=MAX_ORDER`, in log space so
/// high orders at small arguments do not overflow.
fn qgsw_image_sums(lambda: f64, l: f64, width: usize) -> Vec<f64> {
    let ln_k = |x: f64| -> Vec<f64> {
        // K_{m+1}/K_m = K_{m-1}/K_m + 2m/x; the ratio recurrence is stable upward
        let k0 = bessel::k0(x);
        let k1 = bessel::k1(x);
        let mut out = Vec::with_capacity(MAX_ORDER + 1);
        if k0 > 0.0 {
            out.push(k0.ln());
            out.push(k1.ln());
        } else {
            // deep underflow: leading asymptotic in log space
            let base = 0.5 * (PI / (2.0 * x)).ln() - x;
            out.push(base);
            out.push(base);
        }
        let mut ratio = k1 / k0;
        if !ratio.is_finite() {
            ratio = 1.0;
        }
        for m in 1..MAX_ORDER {
            ratio = 1.0 / ratio + 2.0 * m as f64 / x;
            let prev = out[m];
            out.push(prev + ratio.ln());
        }
        out
    };
    let first = ln_k(lambda * (width as f64 + 1.0) * l);
    let mut rel = vec![1.0; MAX_ORDER + 1];
    let mut k = width + 2;
    loop {
        let cur = ln_k(lambda * k as f64 * l);
        let mut biggest: f64 = 0.0;
        for m in 0..=MAX_ORDER {
            let t = (cur[m] - first[m]).exp();
            rel[m] += t;
            biggest = biggest.max(t / rel[m]);
        }
        if biggest < 1e-18 || k > width + 10_000_000 {
            break;
        }
        k += 1;
    }
    first.iter().zip(&rel).map(|(a, b)| a + b.ln()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_regular(kernel: &RadialKernel, l: f64, z: Complex64, k_max: usize) -> f64 {
        let power = kernel.kind() == KernelKind::GsqgPower;
        let mut acc = 0.0;
        for k in (1..=k_max).rev() {
            let kl = k as f64 * l;
            let pair = kernel.g((z - kl).norm()) + kernel.g((z + kl).norm());
            acc += if power { pair - 2.0 * kernel.g(kl) } else { pair };
        }
        acc
    }

    #[test]
    fn sinc_series_and_direct_agree() {
        for &z in &[c(0.49, 0.0), c(0.3, 0.39), c(0.0, 0.499)] {
            let direct = ln_abs_sin(z) - z.norm().ln();
            assert!((ln_abs_sinc(z) - direct).abs() < 1e-14, "{z}");
        }
        // ln(sin x / x) = -x^2/6 - x^4/180 + O(x^6)
        assert!((ln_abs_sinc(c(1e-4, 0.0)) + 1e-8 / 6.0 + 1e-16 / 180.0).abs() < 1e-24);
    }

    #[test]
    fn ln_abs_sin_branches_agree() {
        for &x in &[0.1, 1.0, 2.5] {
            let z = c(x, 1.0);
            let s = z.sin().norm().ln();
            assert!((ln_abs_sin(z) - s).abs() < 1e-14);
            let z = c(x, 1.0 + 1e-12);
            assert!((ln_abs_sin(z) - s).abs() < 1e-11);
        }
    }

    #[test]
    fn qgsw_regular_matches_brute_force() {
        let kernel = RadialKernel::qgsw(1.0).unwrap();
        let lat = LatticeKernel::new(kernel, 1.0);
        for &z in &[c(0.0, 0.0), c(0.1, 0.05), c(0.2, -0.3), c(-0.7, 1.1), c(1.3, 0.9), c(3.0, -2.0)] {
            let brute = brute_regular(&kernel, 1.0, z, 60);
            assert!((lat.regular(z) - brute).abs() < 1e-14, "z = {z}: {} vs {brute}", lat.regular(z));
        }
    }

    #[test]
    fn qgsw_spectral_matches_image_sum() {
        for &lambda in &[0.5, 1.0, 2.0] {
            let kernel = RadialKernel::qgsw(lambda).unwrap();
            let lat = LatticeKernel::new(kernel, 1.0);
            for &z in &[c(0.3, 0.2), c(-0.5, 1.0), c(0.1, -1.6)] {
                let images = kernel.g(z.norm()) + lat.images(z);
                assert!((lat.qgsw_spectral(z) - images).abs() < 1e-13, "lambda {lambda}, z = {z}");
            }
        }
    }

    /// Brute-force gSQG image sum with the leading `n = 2` tail correction.
    fn brute_gsqg(kernel: &RadialKernel, z: Complex64, k_max: usize) -> f64 {
        let beta = kernel.beta();
        let e = pochhammer_over_factorial(0.5 * beta, 2);
        let lead = 2.0 * kernel.prefactor() * hurwitz_zeta(beta + 2.0, k_max as f64 + 1.0);
        let tail = lead * z.norm_sqr() * (e[1] * e[1] + 2.0 * e[2] * e[0] * (2.0 * z.arg()).cos());
        brute_regular(kernel, 1.0, z, k_max) + tail
    }

    #[test]
    fn gsqg_regular_matches_brute_force_with_tail() {
        let kernel = RadialKernel::gsqg(0.5).unwrap();
        let lat = LatticeKernel::new(kernel, 1.0);
        for &z in &[c(0.1, 0.05), c(0.2, -0.3), c(-0.4, 1.0), c(0.5, 1.5)] {
            let brute = brute_gsqg(&kernel, z, 200_000);
            assert!((lat.regular(z) - brute).abs() < 1e-12, "z = {z}: {} vs {brute}", lat.regular(z));
        }
    }

    #[test]
    fn full_is_periodic() {
        for kernel in [RadialKernel::euler(), RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()] {
            let lat = LatticeKernel::new(kernel, 1.3);
            for &z in &[c(0.2, 0.7), c(0.4, -0.1), c(-0.3, 1.2)] {
                let a = lat.full(z);
                let b = lat.full(z + 1.3);
                let d = lat.full(z - 2.0 * 1.3);
                assert!((a - b).abs() < 1e-12 && (a - d).abs() < 1e-12, "{}", kernel.label());
            }
        }
    }

    #[test]
    fn full_is_regular_plus_central_term() {
        for kernel in [RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()] {
            let lat = LatticeKernel::new(kernel, 1.0);
            for &z in &[c(0.2, 0.1), c(-0.3, 0.05)] {
                let a = lat.full(z);
                let b = kernel.g(z.norm()) + lat.regular(z);
                assert!((a - b).abs() < 1e-13);
            }
        }
        // Euler: ln|sin(pi z / l)| = ln|pi z / l| + ln|sinc|
        let lat = LatticeKernel::new(RadialKernel::euler(), 2.0);
        let z = c(0.3, 0.2);
        let want = INV_2PI * (z.norm() * PI / 2.0).ln() + lat.regular(z);
        assert!((lat.full(z) - want).abs() < 1e-14);
    }

    #[test]
    fn tables_cover_far_offsets() {
        let kernel = RadialKernel::gsqg(0.3).unwrap();
        let lat = LatticeKernel::new(kernel, 1.0);
        let z = c(0.0, 20.0);
        let brute = brute_gsqg(&kernel, z, 400_000);
        assert!((lat.regular(z) - brute).abs() < 1e-9);
    }
}
