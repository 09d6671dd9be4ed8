//! The rigid-translation functional of a patch street.
//!
//! The top patch is `eps phi(D)` with `phi(w) = i (w + sigma f(w))`; the bottom
//! patch is its reflection `-eps phi + a - i h`. For a boundary point `w` of the
//! unit circle, `I(eps, f)(w)` is the velocity induced at `eps phi(w)` by the
//! whole street, scaled so that a patch of size `eps` has unit circulation:
//!
//! `I(w) = -(1/(pi eps)) int G_lat(eps (phi(w) - phi(xi))) phi'(xi) dxi + partner row`.
//!
//! The circle part of the self term is exact, `s0 w`, with
//! `s0 = (1/(pi eps)) int G(2 eps |sin(t/2)|) cos t dt`. Everything else
//! (`I_rest`) is O(1) as `eps -> 0`. The residual is
//!
//! `F(w) = Re[conj(I_rest(w) - V) w phi'(w)] + c_self Im f'(w)`, `c_self = -s0 sigma`,
//!
//! where `V` is fixed by removing the `sin(theta)` mode of `F`.
//! At `eps = 0` the limit is evaluated in closed form (`I_rest = J + V0`).

use crate::boundary::{BoundaryMap, MapSamples};
use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::kernels::{bessel, KernelKind, RadialKernel};
use crate::lattice::LatticeKernel;
use crate::point_street::{street_speed_closed_form, street_speed_sum, StreetGeometry};
use crate::quadrature::{log_weights, power_moments, power_weights};
use num_complex::Complex64;
use std::f64::consts::PI;

const INV_2PI: f64 = 0.5 / PI;
/// Relative tolerance of the internal consistency checks on `F`.
pub const CONSISTENCY_TOL: f64 = 1e-10;
/// Smallest admissible `|int w phi'(w) (1 - conj(w)^2) dw|`.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-6;

/// Sine-mode projection of the residual: `modes[j]` multiplies `sin((j+2) theta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualModes {
    pub modes: Vec<f64>,
}

impl ResidualModes {
    pub fn max_abs(&self) -> f64 {
        self.modes.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Residual together with the consistency diagnostics measured on the way.
#[derive(Clone, Debug)]
pub struct Residual {
    pub modes: ResidualModes,
    /// Speed `V(eps, f)` (real part).
    pub v: f64,
    /// Imaginary part of `V` before it was discarded.
    pub v_imag: f64,
    /// `sin(theta)` coefficient of `F` before exclusion.
    pub first_mode: f64,
    /// `max |F(theta) + F(-theta)|`.
    pub symmetry_defect: f64,
    /// `F` at the grid nodes.
    pub samples: Vec<f64>,
}

/// Boundary functional for one kernel, geometry and discretization.
///
/// Caches the periodized kernel, the singular quadrature weights and the
/// point-street speed `V0`, so repeated residual evaluations are cheap.
#[derive(Clone, Debug)]
pub struct Functional {
    kernel: RadialKernel,
    geom: StreetGeometry,
    lattice: LatticeKernel,
    n: usize,
    m: usize,
    weights: Vec<f64>,
    mu1: f64,
    v0: f64,
}

struct Parts {
    samples: MapSamples,
    i_rest: Vec<Complex64>,
    s0: f64,
    c_self: f64,
}

impl Functional {
    /// `n` map coefficients on an `m`-node grid; requires `m` even, `m >= 4n`, `m >= 16`
    /// and a symmetric stagger `a` in `{0, l/2}`.
    pub fn new(kernel: RadialKernel, geom: StreetGeometry, n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("need at least one map coefficient".into()));
        }
        if m % 2 != 0 || m < 4 * n || m < 16 {
            return Err(Error::Precondition(format!("grid needs M even, M >= 4N and M >= 16 (N = {n}, M = {m})")));
        }
        if !geom.is_symmetric() {
            return Err(Error::Precondition(format!(
                "stagger a = {} is not in {{0, l/2}}; real map coefficients need a symmetric street",
                geom.a
            )));
        }
        let (weights, mu1) = match kernel.kind() {
            KernelKind::GsqgPower => (power_weights(kernel.beta(), m), power_moments(kernel.beta(), 1)[1]),
            _ => (log_weights(m), 0.0),
        };
        let v0 = match kernel.kind() {
            KernelKind::EulerLog => street_speed_closed_form(&geom).re,
            _ => street_speed_sum(&kernel, &geom, 1e-14)?.v.re,
        };
        Ok(Functional { kernel, geom, lattice: LatticeKernel::new(kernel, geom.l), n, m, weights, mu1, v0 })
    }

    pub fn kernel(&self) -> &RadialKernel {
        &self.kernel
    }

    pub fn geometry(&self) -> &StreetGeometry {
        &self.geom
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.m
    }

    /// Point-street speed `V0` (real for symmetric staggers).
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Boundary map for this functional's kernel.
    pub fn map(&self, eps: f64, coeffs: Vec<f64>) -> Result<BoundaryMap> {
        if coeffs.len() != self.n {
            return Err(Error::Precondition(format!("expected {} coefficients, got {}", self.n, coeffs.len())));
        }
        BoundaryMap::new(&self.kernel, eps, coeffs)
    }

    /// Circle coefficient `s0` with `I_11(w) = s0 w`, and `c_self = -s0 sigma`.
    fn circle_terms(&self, map: &BoundaryMap) -> (f64, f64) {
        let eps = map.eps();
        if eps == 0.0 {
            let c = match self.kernel.kind() {
                KernelKind::GsqgPower => -self.mu1 / PI,
                _ => INV_2PI,
            };
            return (0.0, c);
        }
        let s0 = match self.kernel.kind() {
            KernelKind::EulerLog => -INV_2PI / eps,
            KernelKind::QgswBessel => {
                let x = self.kernel.lambda() * eps;
                -bessel::i1(x) * bessel::k1(x) / (PI * eps)
            }
            KernelKind::GsqgPower => self.kernel.g(eps) * self.mu1 / (PI * eps),
        };
        (s0, -s0 * map.sigma())
    }

    fn parts(&self, map: &BoundaryMap) -> Result<Parts> {
        if map.coeffs().len() != self.n {
            return Err(Error::Precondition(format!("expected {} coefficients, got {}", self.n, map.coeffs().len())));
        }
        let samples = map.sample(self.m);
        let (s0, c_self) = self.circle_terms(map);
        let i_rest = if map.eps() == 0.0 { self.limit_rest(&samples) } else { self.rest(map, &samples) };
        if i_rest.iter().any(|z| !z.is_finite()) {
            return Err(Error::Consistency("non-finite boundary velocity".into()));
        }
        Ok(Parts { samples, i_rest, s0, c_self })
    }

    /// `I_rest` for `eps > 0`: self term minus its circle part, plus lattice and partner rows.
    fn rest(&self, map: &BoundaryMap, s: &MapSamples) -> Vec<Complex64> {
        let m = self.m;
        let eps = map.eps();
        let sigma = map.sigma();
        let h = 2.0 * PI / m as f64;
        let ln_eps = eps.ln();
        let z0 = Complex64::new(-self.geom.a, self.geom.h);
        let reg0 = self.lattice.regular(Complex64::new(0.0, 0.0));
        let power = self.kernel.kind() == KernelKind::GsqgPower;
        let (beta, g_eps) = if power { (self.kernel.beta(), self.kernel.g(eps)) } else { (0.0, 0.0) };
        // phi'(xi) dxi / dtheta = -xi (1 + sigma f'(xi))
        let dens: Vec<Complex64> = s.w.iter().zip(&s.fp).map(|(w, fp)| -w * (1.0 + sigma * fp)).collect();
        map_range(m, |i| {
            let (wi, fi, fpi, phii) = (s.w[i], s.f[i], s.fp[i], s.phi[i]);
            let own = self.lattice.full(2.0 * eps * phii + z0);
            let mut singular = Complex64::new(0.0, 0.0);
            let mut smooth = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let d = (i + m - j) % m;
                let (wj, dj) = (s.w[j], dens[j]);
                let u = if i == j { sigma * fpi } else { sigma * (fi - s.f[j]) / (wi - wj) };
                let ln_q = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
                let sfp = sigma * s.fp[j];
                if power {
                    // rho^-beta is in the weights; G(eps rho q) s - G(eps rho) = g_eps rho^-beta [(q^-beta - 1) s + sigma f']
                    let qb = (-beta * ln_q).exp_m1();
                    singular += self.weights[d] * g_eps * (-wj) * (qb * (1.0 + sfp) + sfp);
                } else {
                    let rho = if i == j { 0.0 } else { (wi - wj).norm() };
                    let r0 = eps * rho;
                    let r1 = r0 * ln_q.exp();
                    let (a1, b1) = self.kernel.log_split(r1);
                    let (a0, b0) = self.kernel.log_split(r0);
                    let sj = 1.0 + sfp;
                    singular += self.weights[d] * (-wj) * (a1 * sj - a0);
                    smooth += h * (-wj) * (a1 * sj * (ln_eps + ln_q) - a0 * ln_eps + b1 * sj - b0);
                }
                let dphi = phii - s.phi[j];
                let lat = self.lattice.regular(eps * dphi) - reg0;
                let partner = self.lattice.full(eps * (phii + s.phi[j]) + z0) - own;
                smooth += h * (lat + partner) * dj;
            }
            -(singular + smooth) / (PI * eps)
        })
    }

    /// `I_rest` at `eps = 0`: `J + V0` with
    /// `J(w) = -(i/pi)[int g(|w-xi|) f'(xi) dxi + int g'(|w-xi|) Re[(f(w)-f(xi)) conj(w-xi)] / |w-xi| dxi]`,
    /// `g = ln(r)/2pi` (log kernels) or `r^-beta` (power kernel).
    fn limit_rest(&self, s: &MapSamples) -> Vec<Complex64> {
        let m = self.m;
        let h = 2.0 * PI / m as f64;
        let power = self.kernel.kind() == KernelKind::GsqgPower;
        let beta = if power { self.kernel.beta() } else { 0.0 };
        let v0 = Complex64::new(self.v0, 0.0);
        map_range(m, |i| {
            let wi = s.w[i];
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let d = (i + m - j) % m;
                let dxi = Complex64::i() * s.w[j];
                let slope = if i == j { s.fp[i] } else { (s.f[i] - s.f[j]) / (wi - s.w[j]) };
                if power {
                    sum += self.weights[d] * (s.fp[j] - beta * slope.re) * dxi;
                } else {
                    sum += INV_2PI * (self.weights[d] * s.fp[j] + h * slope.re) * dxi;
                }
            }
            -Complex64::i() / PI * sum + v0
        })
    }

    /// `I(eps, f)` at the grid nodes. At `eps = 0` the divergent circle term
    /// `s0 w` is omitted; the returned value is the finite limit `J + V0`.
    pub fn i_eval(&self, map: &BoundaryMap) -> Result<Vec<Complex64>> {
        let p = self.parts(map)?;
        Ok(p.i_rest.iter().zip(&p.samples.w).map(|(r, w)| r + p.s0 * w).collect())
    }

    /// Largest change of `I` at shared nodes when the grid is doubled.
    pub fn self_convergence(&self, map: &BoundaryMap) -> Result<f64> {
        let fine = Functional { weights: Vec::new(), ..self.clone() }.with_grid(2 * self.m)?;
        let a = self.i_eval(map)?;
        let b = fine.i_eval(map)?;
        Ok(a.iter().enumerate().fold(0.0, |mx, (j, v)| mx.max((v - b[2 * j]).norm())))
    }

    /// Same functional on another grid.
    pub fn with_grid(&self, m: usize) -> Result<Self> {
        let mut out = Functional::new(self.kernel, self.geom, self.n, m)?;
        out.v0 = self.v0;
        Ok(out)
    }

    /// Raises an accuracy error when doubling the grid changes `I` by more than `tol`.
    pub fn check_resolution(&self, map: &BoundaryMap, tol: f64) -> Result<f64> {
        let d = self.self_convergence(map)?;
        if d > tol {
            return Err(Error::Accuracy(format!("doubling M = {} changes I by {d:e} > {tol:e}", self.m)));
        }
        Ok(d)
    }

    fn speed(&self, p: &Parts) -> Result<Complex64> {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for j in 0..self.m {
            let w = p.samples.w[j];
            // w phi'(w) (1 - conj(w)^2) i w = -2 sin(theta) w phi'(w)
            let weight = w * p.samples.phip[j] * (1.0 - w.conj() * w.conj()) * Complex64::i() * w;
            num += p.i_rest[j].conj() * weight;
            den += weight;
        }
        let scale = 2.0 * PI / self.m as f64;
        if (den * scale).norm() < DEGENERATE_DENOMINATOR {
            return Err(Error::Degenerate(format!("speed denominator {:e} vanishes", (den * scale).norm())));
        }
        Ok(num / den)
    }

    /// Translation speed `V(eps, f)`; errors if its imaginary part is not negligible.
    pub fn v_of(&self, map: &BoundaryMap) -> Result<f64> {
        let p = self.parts(map)?;
        let v = self.speed(&p)?;
        check_real(v)?;
        Ok(v.re)
    }

    /// Residual and its diagnostics.
    pub fn residual(&self, map: &BoundaryMap) -> Result<Residual> {
        let p = self.parts(map)?;
        let vc = self.speed(&p)?;
        check_real(vc)?;
        let v = vc.re;
        let m = self.m;
        let samples: Vec<f64> = (0..m)
            .map(|j| {
                let w = p.samples.w[j];
                ((p.i_rest[j] - v).conj() * w * p.samples.phip[j]).re + p.c_self * p.samples.fp[j].im
            })
            .collect();
        let scale = samples.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let symmetry_defect = (1..m).fold((samples[0]).abs(), |d, j| d.max((samples[j] + samples[m - j]).abs()));
        if symmetry_defect > CONSISTENCY_TOL * scale {
            return Err(Error::Consistency(format!("residual is not odd in theta: defect {symmetry_defect:e}")));
        }
        let project = |k: usize| -> f64 {
            2.0 / m as f64 * (0..m).map(|j| samples[j] * (2.0 * PI * (k * j) as f64 / m as f64).sin()).sum::<f64>()
        };
        let first_mode = project(1);
        if first_mode.abs() > CONSISTENCY_TOL * scale {
            return Err(Error::Consistency(format!("sin(theta) mode {first_mode:e} survived the speed choice")));
        }
        let modes = ResidualModes { modes: (2..self.n + 2).map(project).collect() };
        Ok(Residual { modes, v, v_imag: vc.im, first_mode, symmetry_defect, samples })
    }

    /// Residual modes only.
    pub fn residual_modes(&self, eps: f64, coeffs: &[f64]) -> Result<ResidualModes> {
        Ok(self.residual(&self.map(eps, coeffs.to_vec())?)?.modes)
    }

    /// Predicted diagonal `d F_{n+1} / d a_n` of the linearization at `(eps, f) = (0, 0)`.
    pub fn predicted_diagonal(&self, n: usize) -> f64 {
        match self.kernel.kind() {
            KernelKind::GsqgPower => power_diagonal(self.kernel.beta(), n),
            _ => linearized_modes_euler(n),
        }
    }

    /// Analytic Jacobian at `(0, 0)`: diagonal in the pairing `a_n -> sin((n+1) theta)`.
    pub fn limit_jacobian(&self) -> Vec<f64> {
        (1..=self.n).map(|n| self.predicted_diagonal(n)).collect()
    }
}

fn check_real(v: Complex64) -> Result<()> {
    if v.im.abs() > CONSISTENCY_TOL * v.re.abs().max(1.0) {
        return Err(Error::Consistency(format!("speed has imaginary part {:e}", v.im)));
    }
    Ok(())
}

/// Sine-mode coefficient produced by `h = w^-n` in the Euler linearization at
/// `(0, 0)`: `F = (1/2pi) Im h'(w) = (n/2pi) sin((n+1) theta)`.
///
/// A positive patch rotates counterclockwise, so the circle term is
/// `-w/(2 pi eps)` and the coefficient is positive.
pub fn linearized_modes_euler(n: usize) -> f64 {
    assert!(n >= 1, "modes start at n = 1");
    n as f64 * INV_2PI
}

/// gSQG diagonal `-(1/pi)[n (mu1 - mu_n) + (beta/2)(mu0 + mu1 - mu_n - mu_{n+1})]`,
/// i.e. `-Im(Lambda_n) / (pi c)` with `Lambda_n` from [`h6_coefficient`].
fn power_diagonal(beta: f64, n: usize) -> f64 {
    let mu = power_moments(beta, n + 1);
    let nf = n as f64;
    -(nf * (mu[1] - mu[n]) + 0.5 * beta * (mu[0] + mu[1] - mu[n] - mu[n + 1])) / PI
}

/// The transversality coefficient `Lambda_n` and its two contour integrals.
#[derive(Clone, Copy, Debug)]
pub struct H6Coefficient {
    pub value: Complex64,
    /// `n int G(|1-xi|)(1 - conj(xi)^(n+1)) dxi`.
    pub first: Complex64,
    /// `-i int G'(|1-xi|)/|1-xi| Im[(1-xi)(1-xi^n)] dxi`.
    pub second: Complex64,
    /// `|Lambda_n| > 1e-10`.
    pub nonzero: bool,
}

/// `Lambda_n` for the power kernel by product quadrature on `m` nodes,
/// cross-checked against `2m` nodes.
pub fn h6_coefficient(kernel: &RadialKernel, n: usize, m: usize) -> Result<H6Coefficient> {
    if kernel.kind() != KernelKind::GsqgPower {
        return Err(Error::Precondition("Lambda_n is defined for the power kernel; log kernels use the Euler linearization".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("modes start at n = 1".into()));
    }
    if m % 2 != 0 || m < 2 * n + 4 {
        return Err(Error::Precondition(format!("grid M = {m} cannot resolve mode {n}")));
    }
    let coarse = h6_on_grid(kernel, n, m);
    let fine = h6_on_grid(kernel, n, 2 * m);
    let diff = (coarse.0 + coarse.1 - fine.0 - fine.1).norm();
    let size = (fine.0 + fine.1).norm();
    if diff > 1e-10 * size.max(1.0) {
        return Err(Error::Accuracy(format!("Lambda_{n} changed by {diff:e} when doubling M = {m}")));
    }
    let value = fine.0 + fine.1;
    Ok(H6Coefficient { value, first: fine.0, second: fine.1, nonzero: value.norm() > 1e-10 })
}

fn h6_on_grid(kernel: &RadialKernel, n: usize, m: usize) -> (Complex64, Complex64) {
    let p = power_weights(kernel.beta(), m);
    let c = kernel.prefactor();
    let beta = kernel.beta();
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for (j, pj) in p.iter().enumerate() {
        let xi = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
        let dxi = Complex64::i() * xi;
        first += pj * c * (1.0 - xi.conj().powu(n as u32 + 1)) * dxi;
        // Im[(1-xi)(1-xi^n)] / |1-xi|^2, smooth with limit 0 at xi = 1
        let ratio = if j == 0 { 0.0 } else { ((1.0 - xi) * (1.0 - xi.powu(n as u32))).im / (1.0 - xi).norm_sqr() };
        second += pj * (-beta * c) * ratio * dxi;
    }
    (n as f64 * first, -Complex64::i() * second)
}
