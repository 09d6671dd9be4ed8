//! Patch boundaries: the conformal-map parameterization and sampled curves.

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::quadrature::spectral_derivative;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `phi(w) = i (w + sigma f(w))` with `f(w) = sum_n a_n w^-n`, real `a_n`.
///
/// `sigma = eps` for log-type kernels and `eps / G(eps)` for the power kernel;
/// `eps = 0` is the unit circle. Real coefficients make the curve symmetric
/// under `phi(conj w) = -conj(phi(w))`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMap {
    eps: f64,
    sigma: f64,
    coeffs: Vec<f64>,
}

/// Node values of a [`BoundaryMap`] on the grid `w_j = exp(2 pi i j / M)`.
#[derive(Clone, Debug)]
pub struct MapSamples {
    pub w: Vec<Complex64>,
    pub f: Vec<Complex64>,
    /// `f'(w)` (derivative in `w`).
    pub fp: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    /// `phi'(w) = i (1 + sigma f'(w))`.
    pub phip: Vec<Complex64>,
}

impl BoundaryMap {
    /// Validates `0 <= eps < 1` and the bilipschitz guard `sum n |a_n| < 1`.
    pub fn new(kernel: &RadialKernel, eps: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(eps >= 0.0 && eps < 1.0) {
            return Err(Error::Precondition(format!("boundary map needs 0 <= eps < 1, got {eps}")));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("non-finite map coefficient".into()));
        }
        let guard = guard_norm(&coeffs);
        if guard >= 1.0 {
            return Err(Error::Domain(format!("bilipschitz guard violated: sum n|a_n| = {guard} >= 1")));
        }
        let sigma = if eps == 0.0 { 0.0 } else { kernel.map_scale(eps)? };
        Ok(BoundaryMap { eps, sigma, coeffs })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Map scale `sigma(eps)`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `sum n |a_n|`.
    pub fn guard(&self) -> f64 {
        guard_norm(&self.coeffs)
    }

    /// `(f(w), f'(w))`.
    pub fn f_and_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        let inv = w.inv();
        let mut p = inv;
        let mut f = Complex64::new(0.0, 0.0);
        let mut fp = Complex64::new(0.0, 0.0);
        for (k, &a) in self.coeffs.iter().enumerate() {
            let n = (k + 1) as f64;
            f += a * p;
            p *= inv;
            fp -= a * n * p;
        }
        (f, fp)
    }

    pub fn phi(&self, w: Complex64) -> Complex64 {
        let (f, _) = self.f_and_derivative(w);
        Complex64::i() * (w + self.sigma * f)
    }

    pub fn phi_prime(&self, w: Complex64) -> Complex64 {
        let (_, fp) = self.f_and_derivative(w);
        Complex64::i() * (1.0 + self.sigma * fp)
    }

    /// Values on the uniform grid of `m` nodes.
    pub fn sample(&self, m: usize) -> MapSamples {
        let mut s = MapSamples {
            w: Vec::with_capacity(m),
            f: Vec::with_capacity(m),
            fp: Vec::with_capacity(m),
            phi: Vec::with_capacity(m),
            phip: Vec::with_capacity(m),
        };
        for j in 0..m {
            let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            let (f, fp) = self.f_and_derivative(w);
            s.w.push(w);
            s.f.push(f);
            s.fp.push(fp);
            s.phi.push(Complex64::i() * (w + self.sigma * f));
            s.phip.push(Complex64::i() * (1.0 + self.sigma * fp));
        }
        s
    }

    /// Physical boundary `center + eps phi(w)` of the top patch, sampled on `m` nodes.
    pub fn physical_boundary(&self, center: Complex64, m: usize) -> Result<SampledBoundary> {
        let s = self.sample(m);
        let nodes = s.phi.iter().map(|p| center + self.eps * p).collect();
        // d/dtheta of eps phi(e^{i theta}) = eps phi'(w) i w
        let derivs = s.phip.iter().zip(&s.w).map(|(p, w)| self.eps * p * Complex64::i() * w).collect();
        SampledBoundary::new(nodes, derivs)
    }
}

fn guard_norm(coeffs: &[f64]) -> f64 {
    coeffs.iter().enumerate().map(|(k, a)| (k + 1) as f64 * a.abs()).sum()
}

/// A closed, positively oriented curve sampled uniformly in its parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledBoundary {
    nodes: Vec<Complex64>,
    /// `dz/dtheta` at the nodes, `theta_j = 2 pi j / M`.
    derivs: Vec<Complex64>,
}

impl SampledBoundary {
    /// Requires `M >= 16`, `M` even, matching lengths and finite values.
    pub fn new(nodes: Vec<Complex64>, derivs: Vec<Complex64>) -> Result<Self> {
        let m = nodes.len();
        if m < 16 || m % 2 != 0 {
            return Err(Error::Precondition(format!("boundary needs an even node count >= 16, got {m}")));
        }
        if derivs.len() != m {
            return Err(Error::Precondition("node and derivative arrays differ in length".into()));
        }
        if nodes.iter().chain(&derivs).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite boundary sample".into()));
        }
        Ok(SampledBoundary { nodes, derivs })
    }

    /// Nodes only; derivatives by FFT differentiation.
    pub fn from_nodes(nodes: Vec<Complex64>) -> Result<Self> {
        let derivs = spectral_derivative(&nodes);
        SampledBoundary::new(nodes, derivs)
    }

    pub fn circle(center: Complex64, radius: f64, m: usize) -> Result<Self> {
        SampledBoundary::ellipse(center, radius, radius, m)
    }

    /// Ellipse with semi-axes `a` (horizontal) and `b` (vertical).
    pub fn ellipse(center: Complex64, a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain("ellipse semi-axes must be positive".into()));
        }
        let mut nodes = Vec::with_capacity(m);
        let mut derivs = Vec::with_capacity(m);
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            let (s, c) = t.sin_cos();
            nodes.push(center + Complex64::new(a * c, b * s));
            derivs.push(Complex64::new(-a * s, b * c));
        }
        SampledBoundary::new(nodes, derivs)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn derivs(&self) -> &[Complex64] {
        &self.derivs
    }

    /// Point reflection `z -> -z + a - i h`, which keeps the orientation.
    pub fn partner(&self, a: f64, h: f64) -> SampledBoundary {
        let shift = Complex64::new(a, -h);
        SampledBoundary {
            nodes: self.nodes.iter().map(|z| -z + shift).collect(),
            derivs: self.derivs.iter().map(|d| -d).collect(),
        }
    }

    pub fn translated(&self, dz: Complex64) -> SampledBoundary {
        SampledBoundary { nodes: self.nodes.iter().map(|z| z + dz).collect(), derivs: self.derivs.clone() }
    }

    /// Enclosed area `(1/2) int Im(conj(z) dz)` by the trapezoid rule.
    pub fn area(&self) -> f64 {
        let h = 2.0 * PI / self.len() as f64;
        0.5 * h * self.nodes.iter().zip(&self.derivs).map(|(z, d)| (z.conj() * d).im).sum::<f64>()
    }

    /// Area centroid `(1/A) int z dA = (1/(2 i A)) int |z|^2 dz`.
    pub fn centroid(&self) -> Complex64 {
        let h = 2.0 * PI / self.len() as f64;
        let s: Complex64 = self.nodes.iter().zip(&self.derivs).map(|(z, d)| z.norm_sqr() * d).sum();
        s * h / (Complex64::new(0.0, 2.0) * self.area())
    }

    /// Smallest and largest distance between consecutive nodes.
    pub fn spacing(&self) -> (f64, f64) {
        let m = self.len();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for j in 0..m {
            let d = (self.nodes[(j + 1) % m] - self.nodes[j]).norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// Largest extent `max |z_i - z_j|`.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// True when the node polygon has no crossing edges and positive area.
    pub fn is_simple(&self) -> bool {
        let m = self.len();
        for i in 0..m {
            let (p1, p2) = (self.nodes[i], self.nodes[(i + 1) % m]);
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (q1, q2) = (self.nodes[j], self.nodes[(j + 1) % m]);
                if segments_cross(p1, p2, q1, q2) {
                    return false;
                }
            }
        }
        self.area() > 0.0
    }

    /// Distance from `x` to the nearest node.
    pub fn node_distance(&self, x: Complex64) -> f64 {
        self.nodes.iter().map(|z| (z - x).norm()).fold(f64::INFINITY, f64::min)
    }
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let cross = |a: Complex64, b: Complex64| a.re * b.im - a.im * b.re;
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
