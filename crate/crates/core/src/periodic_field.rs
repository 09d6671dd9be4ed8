//! Velocity of a periodic patch street at points off the patch boundaries.
//!
//! Patches carry vorticity `q` on `D1 + k l` and `-q` on `D2 + k l`; the
//! representations below use `q = 1/pi` so that a patch of area `pi`
//! has unit circulation. All boundary integrals use the trapezoid rule on the
//! uniform parameter grid, which is spectrally accurate away from the curve.

use crate::boundary::SampledBoundary;
use crate::error::{Error, Result};
use crate::lattice::{ln_abs_sin, ln_abs_sinc, LatticeKernel};
use crate::point_street::StreetGeometry;
use crate::quadrature::gauss_legendre;
use crate::kernels::RadialKernel;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Evaluation points closer than this to a boundary node are rejected.
pub const NEAR_BOUNDARY: f64 = 1e-8;

fn check_exterior(x: Complex64, bs: &[&SampledBoundary]) -> Result<()> {
    for b in bs {
        let d = b.node_distance(x);
        if d < NEAR_BOUNDARY {
            return Err(Error::Range(format!(
                "point {x} lies {d:e} from a boundary node; use the on-boundary functional evaluation"
            )));
        }
    }
    Ok(())
}

/// `int f(xi) dxi` by the trapezoid rule.
fn contour_integral<F: Fn(Complex64) -> Complex64>(b: &SampledBoundary, f: F) -> Complex64 {
    let h = 2.0 * PI / b.len() as f64;
    b.nodes().iter().zip(b.derivs()).map(|(z, d)| f(*z) * d).sum::<Complex64>() * h
}

/// `v(x) = -(1/2pi^2) int_dD1 ln|sin(pi(x-xi)/l)| dxi + (1/2pi^2) int_dD2 (same)`.
pub fn euler_velocity_logsin(x: Complex64, b1: &SampledBoundary, b2: &SampledBoundary, l: f64) -> Result<Complex64> {
    check_exterior(x, &[b1, b2])?;
    let k = PI / l;
    let f = |xi: Complex64| Complex64::new(ln_abs_sin((x - xi) * k), 0.0);
    let c = 0.5 / (PI * PI);
    Ok(-c * contour_integral(b1, f) + c * contour_integral(b2, f))
}

/// Split form: Cauchy-type term plus the smooth `ln|H|` remainder, `H(z) = sin(z)/z`.
pub fn decomposed_velocity(x: Complex64, b1: &SampledBoundary, b2: &SampledBoundary, l: f64) -> Result<Complex64> {
    check_exterior(x, &[b1, b2])?;
    let k = PI / l;
    let cauchy = |xi: Complex64| (x - xi).conj() / (x - xi);
    let h = |xi: Complex64| Complex64::new(ln_abs_sinc((x - xi) * k), 0.0);
    let c4 = 0.25 / (PI * PI);
    let c2 = 0.5 / (PI * PI);
    Ok(c4 * contour_integral(b1, cauchy).conj() - c2 * contour_integral(b1, h) - c4 * contour_integral(b2, cauchy).conj()
        + c2 * contour_integral(b2, h))
}

/// Quadrature grid over a region star-shaped about `center`.
#[derive(Clone, Debug)]
pub struct AreaGrid {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl AreaGrid {
    /// Maps `(s, t) -> center + s (z(t) - center)`: Gauss-Legendre in `s`,
    /// the boundary's own uniform grid in `t`. Requires star-shapedness.
    pub fn from_boundary(b: &SampledBoundary, center: Complex64, radial: usize) -> Result<Self> {
        let (gx, gw) = gauss_legendre(radial);
        let h = 2.0 * PI / b.len() as f64;
        let mut points = Vec::with_capacity(radial * b.len());
        let mut weights = Vec::with_capacity(radial * b.len());
        for (z, d) in b.nodes().iter().zip(b.derivs()) {
            let jac = ((z - center).conj() * d).im;
            if jac <= 0.0 {
                return Err(Error::Precondition("area grid needs a region star-shaped about its center".into()));
            }
            for (x, w) in gx.iter().zip(&gw) {
                let s = 0.5 * (x + 1.0);
                points.push(center + s * (z - center));
                weights.push(0.5 * w * s * jac * h);
            }
        }
        Ok(AreaGrid { points, weights })
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `v(x) = (i/(2 pi l)) conj(int_D1 cot(pi(x-y)/l) dA) - (same over D2)`.
///
/// Area quadrature; intended as an independent check of the boundary forms.
pub fn euler_velocity_cot(x: Complex64, d1: &AreaGrid, d2: &AreaGrid, l: f64) -> Complex64 {
    let k = PI / l;
    let integral = |g: &AreaGrid| -> Complex64 {
        g.points
            .iter()
            .zip(&g.weights)
            .map(|(y, w)| {
                let z = (x - y) * k;
                w * z.cos() / z.sin()
            })
            .sum()
    };
    let c = Complex64::new(0.0, 1.0 / (2.0 * PI * l));
    c * integral(d1).conj() - c * integral(d2).conj()
}

/// Velocity of a patch street for any kernel via the lattice-summed kernel:
/// `v(x) = -(1/pi) int_dD1 L(x - xi) dxi + (1/pi) int_dD2 L(x - xi) dxi`.
#[derive(Clone, Debug)]
pub struct StreetField {
    lattice: LatticeKernel,
    b1: SampledBoundary,
    b2: SampledBoundary,
}

impl StreetField {
    pub fn new(kernel: RadialKernel, l: f64, b1: SampledBoundary, b2: SampledBoundary) -> Self {
        StreetField { lattice: LatticeKernel::new(kernel, l), b1, b2 }
    }

    pub fn velocity(&self, x: Complex64) -> Result<Complex64> {
        check_exterior(x, &[&self.b1, &self.b2])?;
        let f = |xi: Complex64| Complex64::new(self.lattice.full(x - xi), 0.0);
        Ok((contour_integral(&self.b2, f) - contour_integral(&self.b1, f)) / PI)
    }

    /// Velocities on a rectangular grid, row-major in `y` then `x`.
    /// Points within [`NEAR_BOUNDARY`] of a node yield `None`.
    pub fn sample_grid(&self, x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Vec<(f64, f64, Option<Complex64>)> {
        let coord = |lo: f64, hi: f64, n: usize, i: usize| if n <= 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        crate::exec::map_range(nx * ny, |idx| {
            let (iy, ix) = (idx / nx, idx % nx);
            let x = coord(x_range.0, x_range.1, nx, ix);
            let y = coord(y_range.0, y_range.1, ny, iy);
            (x, y, self.velocity(Complex64::new(x, y)).ok())
        })
    }
}

/// One-shot lattice velocity; `tol` only validates the request since the
/// lattice sums are evaluated to machine precision.
pub fn lattice_velocity(
    kernel: &RadialKernel,
    x: Complex64,
    b1: &SampledBoundary,
    b2: &SampledBoundary,
    geom: &StreetGeometry,
    tol: f64,
) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    StreetField::new(*kernel, geom.l, b1.clone(), b2.clone()).velocity(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_street::{street_speed_closed_form, street_speed_sum};

    fn street(rho: f64, geom: &StreetGeometry, m: usize) -> (SampledBoundary, SampledBoundary) {
        let b1 = SampledBoundary::circle(Complex64::new(0.0, 0.0), rho, m).unwrap();
        let b2 = b1.partner(geom.a, geom.h);
        (b1, b2)
    }

    #[test]
    fn three_euler_forms_agree() {
        let g = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
        let b1 = SampledBoundary::ellipse(Complex64::new(0.0, 0.0), 0.2, 0.1, 128).unwrap();
        let b2 = b1.partner(g.a, g.h);
        let a1 = AreaGrid::from_boundary(&b1, Complex64::new(0.0, 0.0), 24).unwrap();
        let a2 = AreaGrid::from_boundary(&b2, b2.centroid(), 24).unwrap();
        for &x in &[Complex64::new(0.4, 0.2), Complex64::new(0.3, -0.5), Complex64::new(-0.2, 0.6)] {
            let v1 = euler_velocity_logsin(x, &b1, &b2, 1.0).unwrap();
            let v2 = euler_velocity_cot(x, &a1, &a2, 1.0);
            let v3 = decomposed_velocity(x, &b1, &b2, 1.0).unwrap();
            assert!((v1 - v2).norm() < 1e-10, "{v1} vs {v2}");
            assert!((v1 - v3).norm() < 1e-12, "{v1} vs {v3}");
        }
    }

    #[test]
    fn small_patches_recover_point_street() {
        let g = StreetGeometry::new(1.0, 1.0, 0.0).unwrap();
        let rho = 1e-3;
        let (b1, b2) = street(rho, &g, 32);
        // velocity at the center of the top patch: exterior of D2, interior of D1 where the
        // log form stays valid; the self-term of a disk vanishes at its center
        let v = euler_velocity_logsin(Complex64::new(0.0, 0.0), &b1, &b2, 1.0).unwrap() / (rho * rho);
        assert!((v - street_speed_closed_form(&g)).norm() < 1e-6);
    }

    #[test]
    fn periodic_in_x() {
        let g = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
        let (b1, b2) = street(0.1, &g, 64);
        let x = Complex64::new(0.3, 0.4);
        let a = euler_velocity_logsin(x, &b1, &b2, 1.0).unwrap();
        let b = euler_velocity_logsin(x + 1.0, &b1, &b2, 1.0).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn identical_rows_cancel() {
        let b1 = SampledBoundary::circle(Complex64::new(0.0, 0.0), 0.1, 32).unwrap();
        let a = AreaGrid::from_boundary(&b1, Complex64::new(0.0, 0.0), 8).unwrap();
        assert_eq!(euler_velocity_cot(Complex64::new(0.3, 0.3), &a, &a, 1.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn near_boundary_is_rejected() {
        let g = StreetGeometry::new(1.0, 1.0, 0.0).unwrap();
        let (b1, b2) = street(0.1, &g, 32);
        let x = b1.nodes()[3];
        assert!(matches!(euler_velocity_logsin(x, &b1, &b2, 1.0), Err(Error::Range(_))));
    }

    #[test]
    fn lattice_field_matches_euler_form_and_point_limits() {
        let g = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
        let (b1, b2) = street(0.1, &g, 64);
        let x = Complex64::new(0.35, 0.25);
        let e = lattice_velocity(&RadialKernel::euler(), x, &b1, &b2, &g, 1e-12).unwrap();
        assert!((e - euler_velocity_logsin(x, &b1, &b2, 1.0).unwrap()).norm() < 1e-13);
        let rho = 1e-3;
        let (b1, b2) = street(rho, &g, 32);
        for kernel in [RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()] {
            let v = lattice_velocity(&kernel, Complex64::new(0.0, 0.0), &b1, &b2, &g, 1e-12).unwrap() / (rho * rho);
            let v0 = street_speed_sum(&kernel, &g, 1e-12).unwrap().v;
            assert!((v - v0).norm() < 1e-5 * v0.norm(), "{}: {v} vs {v0}", kernel.label());
        }
    }
}
