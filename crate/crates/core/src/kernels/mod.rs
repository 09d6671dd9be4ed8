//! Radial interaction kernels `G(r)` and their derivatives.
//!
//! The three kernels share the normalization that makes each one behave like
//! `ln(r) / 2pi` (or a power law) at short range, so that a patch of unit
//! circulation induces an `O(1 / eps)` rotation regardless of the model.

pub mod bessel;

use crate::error::{Error, Result};
use crate::special::gamma_fn;
use std::f64::consts::PI;

pub use bessel::{bessel_k0, bessel_k1, qgsw_smooth_part, BesselValue, QGSW_G1};

const INV_2PI: f64 = 0.5 / PI;

/// Which active-scalar model a kernel belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    EulerLog,
    QgswBessel,
    GsqgPower,
}

impl KernelKind {
    /// Short lowercase identifier used in records and file names.
    pub fn id(self) -> &'static str {
        match self {
            KernelKind::EulerLog => "euler",
            KernelKind::QgswBessel => "qgsw",
            KernelKind::GsqgPower => "gsqg",
        }
    }

    /// Log-type kernels have a logarithmic singularity at the origin.
    pub fn is_log_type(self) -> bool {
        !matches!(self, KernelKind::GsqgPower)
    }
}

/// Radial kernel `G(|x|)`; immutable after construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialKernel {
    kind: KernelKind,
    lambda: f64,
    beta: f64,
    /// Overall prefactor: `1/2pi` for log-type kernels, `C_beta/2pi` for power.
    prefactor: f64,
}

impl RadialKernel {
    /// Euler: `G(r) = ln(r) / 2pi`.
    pub fn euler() -> Self {
        RadialKernel { kind: KernelKind::EulerLog, lambda: 0.0, beta: 0.0, prefactor: INV_2PI }
    }

    /// QGSW with inverse deformation length `lambda`: `G(r) = -K0(lambda r) / 2pi`.
    pub fn qgsw(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("QGSW needs lambda > 0, got {lambda}")));
        }
        Ok(RadialKernel { kind: KernelKind::QgswBessel, lambda, beta: 0.0, prefactor: INV_2PI })
    }

    /// gSQG with exponent `beta` in (0, 1): `G(r) = C_beta / 2pi * r^-beta`.
    pub fn gsqg(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!("gSQG needs beta in (0, 1), got {beta}")));
        }
        let prefactor = c_beta(beta) * INV_2PI;
        Ok(RadialKernel { kind: KernelKind::GsqgPower, lambda: 0.0, beta, prefactor })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// QGSW inverse deformation length (0 for other kernels).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// gSQG exponent (0 for log-type kernels).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Far-field decay exponent `beta1` with `|G'(r)| <= C r^-(1+beta1)`.
    ///
    /// Euler has no such decay (`0`); its lattice sums rely on pairing.
    pub fn decay_exponent(&self) -> f64 {
        match self.kind {
            KernelKind::EulerLog => 0.0,
            KernelKind::QgswBessel => 1.0,
            KernelKind::GsqgPower => self.beta,
        }
    }

    /// Short-range singularity exponent `beta2` (`0` for log-type kernels).
    pub fn singularity_exponent(&self) -> f64 {
        self.beta
    }

    /// Overall prefactor of `G`: `1/2pi` or `C_beta/2pi`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Identifier with parameters, e.g. `qgsw(lambda=1)`.
    pub fn label(&self) -> String {
        match self.kind {
            KernelKind::EulerLog => "euler".to_string(),
            KernelKind::QgswBessel => format!("qgsw(lambda={})", self.lambda),
            KernelKind::GsqgPower => format!("gsqg(beta={})", self.beta),
        }
    }

    /// `G(r)` for `r > 0`.
    pub fn eval_g(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.g(r))
    }

    /// `G'(r)` for `r > 0`.
    pub fn eval_gprime(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.gp(r))
    }

    /// Conformal-map scale `sigma(eps)`: `eps` for log-type kernels and
    /// `eps / G(eps)` for the power kernel. Requires `0 < eps < 1`.
    pub fn map_scale(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Precondition(format!("map scale needs 0 < eps < 1, got {eps}")));
        }
        Ok(self.sigma(eps))
    }

    /// Unchecked `G(r)`.
    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::EulerLog => INV_2PI * r.ln(),
            KernelKind::QgswBessel => -INV_2PI * bessel::k0(self.lambda * r),
            KernelKind::GsqgPower => self.prefactor * r.powf(-self.beta),
        }
    }

    /// Unchecked `G'(r)`.
    #[inline]
    pub fn gp(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::EulerLog => INV_2PI / r,
            KernelKind::QgswBessel => INV_2PI * self.lambda * bessel::k1(self.lambda * r),
            KernelKind::GsqgPower => -self.beta * self.prefactor * r.powf(-self.beta - 1.0),
        }
    }

    pub(crate) fn sigma(&self, eps: f64) -> f64 {
        match self.kind {
            KernelKind::GsqgPower => eps / self.g(eps),
            _ => eps,
        }
    }

    /// Splitting `G(r) = A(r) ln r + B(r)` with `A`, `B` even and smooth in `r`.
    ///
    /// Only meaningful for log-type kernels; `r = 0` returns the limits.
    #[inline]
    pub(crate) fn log_split(&self, r: f64) -> (f64, f64) {
        match self.kind {
            KernelKind::EulerLog => (INV_2PI, 0.0),
            KernelKind::QgswBessel => {
                // -K0(x)/2pi = I0(x) ln(r)/2pi + [I0(x) ln(lambda/2) - P(x)]/2pi, x = lambda r
                let x = self.lambda * r;
                let i0 = bessel::i0(x);
                let p = bessel::k0_series_regular_part(x);
                (INV_2PI * i0, INV_2PI * (i0 * (0.5 * self.lambda).ln() - p))
            }
            KernelKind::GsqgPower => unreachable!("power kernel has no logarithmic split"),
        }
    }
}

/// `C_beta = Gamma(beta/2) / (2^(1-beta) Gamma((2-beta)/2))`.
pub fn c_beta(beta: f64) -> f64 {
    gamma_fn(0.5 * beta) / (2f64.powf(1.0 - beta) * gamma_fn(0.5 * (2.0 - beta)))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("kernel is singular at r <= 0 (got r = {r})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_values() {
        let k = RadialKernel::euler();
        assert_eq!(k.eval_g(1.0).unwrap(), 0.0);
        assert!((k.eval_gprime(2.0).unwrap() - 0.25 / PI).abs() < 1e-17);
    }

    #[test]
    fn qgsw_values_carry_the_2pi_normalization() {
        let k = RadialKernel::qgsw(1.0).unwrap();
        let two_pi = 2.0 * PI;
        assert!((two_pi * k.eval_g(1.0).unwrap() + 0.42102443824070833334).abs() < 1e-14);
        assert!((two_pi * k.eval_gprime(1.0).unwrap() - 0.60190723019723457474).abs() < 1e-14);
    }

    #[test]
    fn gsqg_values() {
        let k = RadialKernel::gsqg(0.5).unwrap();
        // C_0.5 from 20-digit arithmetic
        let c = 2.0920992401062032979 / (2.0 * PI);
        assert!((k.eval_g(1.0).unwrap() - c).abs() < 1e-14);
        assert!((k.eval_gprime(4.0).unwrap() + 0.5 * c * 4f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn singular_radius_is_rejected() {
        for k in [RadialKernel::euler(), RadialKernel::qgsw(2.0).unwrap(), RadialKernel::gsqg(0.3).unwrap()] {
            assert!(matches!(k.eval_g(0.0), Err(Error::Domain(_))));
            assert!(matches!(k.eval_gprime(-1.0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(RadialKernel::qgsw(0.0).is_err());
        assert!(RadialKernel::gsqg(1.0).is_err());
        assert!(RadialKernel::gsqg(0.0).is_err());
    }

    #[test]
    fn map_scale_rules() {
        let e = RadialKernel::euler();
        assert_eq!(e.map_scale(0.01).unwrap(), 0.01);
        assert_eq!(RadialKernel::qgsw(1.0).unwrap().map_scale(0.01).unwrap(), 0.01);
        let g = RadialKernel::gsqg(0.5).unwrap();
        assert!((g.map_scale(0.01).unwrap() - 0.01 / g.g(0.01)).abs() < 1e-18);
        assert!(e.map_scale(1.0).is_err());
    }

    #[test]
    fn log_split_reassembles_g() {
        let k = RadialKernel::qgsw(1.7).unwrap();
        for &r in &[1e-3, 0.1, 0.5, 1.0] {
            let (a, b) = k.log_split(r);
            assert!((a * r.ln() + b - k.g(r)).abs() < 1e-14, "r = {r}");
        }
        let (a0, b0) = k.log_split(0.0);
        assert!((a0 - INV_2PI).abs() < 1e-17);
        let expect = INV_2PI * ((0.5 * 1.7f64).ln() + crate::special::EULER_GAMMA);
        assert!((b0 - expect).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let kernels = [RadialKernel::euler(), RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()];
        for k in kernels {
            let mut r = 0.1;
            while r <= 10.0 {
                let h = 1e-5 * r;
                let fd = (k.g(r + h) - k.g(r - h)) / (2.0 * h);
                assert!(((fd - k.gp(r)) / k.gp(r)).abs() < 1e-6, "{} at r = {r}", k.label());
                r *= 1.1;
            }
        }
    }

    #[test]
    fn far_field_decay() {
        let g = RadialKernel::gsqg(0.5).unwrap();
        let c0 = g.gp(1.0).abs();
        for &r in &[2.0, 10.0, 100.0] {
            let scaled = g.gp(r).abs() * r.powf(1.5);
            assert!((scaled - c0).abs() < 1e-13 * c0);
        }
        let q = RadialKernel::qgsw(1.0).unwrap();
        let samples: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&r: &f64| q.gp(r).abs() * (0.5 * r).exp()).collect();
        assert!(samples[0] > samples[1] && samples[1] > samples[2] && samples[2] < 1e-7);
    }

    #[test]
    fn power_law_scaling_identities() {
        let k = RadialKernel::gsqg(0.5).unwrap();
        let c = k.prefactor();
        for &r in &[0.1, 0.5, 1.0, 1.9] {
            for &eps in &[1e-2, 1e-3, 1e-4] {
                let ratio_g = k.g(eps * r) / (k.g(eps) * k.g(r));
                let ratio_gp = eps * k.gp(eps * r) / (k.g(eps) * k.gp(r));
                assert!((c * ratio_g - 1.0).abs() < 1e-13);
                assert!((c * ratio_gp - 1.0).abs() < 1e-13);
            }
        }
    }
}
