//! Point-vortex streets: two-vortex motion, street speeds, lattice dynamics.
//!
//! Strength convention: the top row sits at `k l` with strength `+1`, the
//! bottom row at `a + k l - i h` with strength `-1`. A vortex of strength
//! `gamma` at `y` induces `i gamma G'(r) (x - y) / r` at `x`, `r = |x - y|`.

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::kernels::{KernelKind, RadialKernel};
use crate::special::hurwitz_zeta;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest symmetric truncation tried by [`street_speed_sum`].
pub const MAX_TRUNCATION: usize = 10_000_000;

/// Period `l > 0`, row separation `h != 0`, stagger `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreetGeometry {
    pub l: f64,
    pub h: f64,
    pub a: f64,
}

impl StreetGeometry {
    pub fn new(l: f64, h: f64, a: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("period l must be positive, got {l}")));
        }
        if h == 0.0 || !h.is_finite() {
            return Err(Error::Domain(format!("row separation h must be nonzero, got {h}")));
        }
        if !a.is_finite() {
            return Err(Error::Domain("stagger a must be finite".into()));
        }
        Ok(StreetGeometry { l, h, a })
    }

    /// Offset `a - i h` of the bottom row.
    pub fn offset(&self) -> Complex64 {
        Complex64::new(self.a, -self.h)
    }

    /// True for the symmetric staggers `a = 0` and `a = l/2` (mod `l`).
    pub fn is_symmetric(&self) -> bool {
        let r = self.a.rem_euclid(self.l) / self.l;
        let tol = 1e-12;
        r < tol || (r - 0.5).abs() < tol || (1.0 - r) < tol
    }
}

/// Motion of an isolated pair of point vortices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwoVortexMotion {
    /// Rigid rotation `dz/dt = i omega z` about the vorticity center.
    Rotation { omega: f64 },
    /// Common translation velocity.
    Translation { u: Complex64 },
}

/// Classifies the motion of two vortices on the real axis.
///
/// Rotation when `gamma1 + gamma2 != 0` (the data must be centered,
/// `gamma1 z1 + gamma2 z2 = 0`), translation otherwise.
pub fn two_vortex_motion(
    gamma1: f64,
    gamma2: f64,
    z1: Complex64,
    z2: Complex64,
    kernel: &RadialKernel,
) -> Result<TwoVortexMotion> {
    let d = (z1 - z2).norm();
    if d == 0.0 {
        return Err(Error::Domain("coincident vortices".into()));
    }
    let scale = z1.norm().max(z2.norm()).max(d);
    if z1.im.abs() > 1e-12 * scale || z2.im.abs() > 1e-12 * scale {
        return Err(Error::Precondition("two-vortex data must lie on the real axis".into()));
    }
    let total = gamma1 + gamma2;
    let gp = kernel.gp(d);
    if total.abs() > 1e-14 * (gamma1.abs() + gamma2.abs()) {
        let center = gamma1 * z1 + gamma2 * z2;
        if center.norm() > 1e-10 * scale * (gamma1.abs() + gamma2.abs()) {
            return Err(Error::Precondition(format!("vorticity center {center} is not at the origin")));
        }
        Ok(TwoVortexMotion::Rotation { omega: total * gp / d })
    } else {
        let sign = (z1.re - z2.re).signum();
        Ok(TwoVortexMotion::Translation { u: Complex64::new(0.0, gamma2 * gp * sign) })
    }
}

/// Euler street speed `(1/(2 l i)) conj(cot(pi (i h - a) / l))`.
pub fn street_speed_closed_form(geom: &StreetGeometry) -> Complex64 {
    let z = Complex64::new(-geom.a, geom.h) * (PI / geom.l);
    let cot = z.cos() / z.sin();
    cot.conj() / Complex64::new(0.0, 2.0 * geom.l)
}

/// Velocity induced at the origin by the unit negative vortex at `a + k l - i h`.
#[inline]
fn street_term(kernel: &RadialKernel, d: Complex64) -> Complex64 {
    let r = d.norm();
    Complex64::new(0.0, kernel.gp(r) / r) * d
}

/// Symmetric partial sum `V_K = i sum_{|k|<=K} G'(|d_k|) d_k / |d_k|`, `d_k = a + k l - i h`.
pub fn street_speed_truncated(kernel: &RadialKernel, geom: &StreetGeometry, k_max: usize) -> Complex64 {
    let d0 = geom.offset();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..=k_max).rev() {
        let kl = k as f64 * geom.l;
        acc += street_term(kernel, d0 + kl) + street_term(kernel, d0 - kl);
    }
    acc + street_term(kernel, d0)
}

/// Asymptotic value of the omitted pairs `K < |k|`.
fn street_tail(kernel: &RadialKernel, geom: &StreetGeometry, k_max: usize) -> Complex64 {
    let d = geom.offset();
    let l = geom.l;
    let a = k_max as f64 + 1.0;
    match kernel.kind() {
        KernelKind::EulerLog => {
            // pair sum of 1/conj(d_k) is 2 D/(D^2 - k^2 l^2), D = conj(d)
            let dd = d.conj();
            let s = -(2.0 * dd / (l * l)) * hurwitz_zeta(2.0, a)
                - (2.0 * dd.powi(3) / l.powi(4)) * hurwitz_zeta(4.0, a)
                - (2.0 * dd.powi(5) / l.powi(6)) * hurwitz_zeta(6.0, a);
            Complex64::new(0.0, 0.5 / PI) * s
        }
        KernelKind::GsqgPower => {
            let beta = kernel.beta();
            let c = kernel.prefactor();
            let lead = (0.5 * beta) * d + (1.0 + 0.5 * beta) * d.conj();
            let s = 2.0 * beta * c * l.powf(-beta - 2.0) * hurwitz_zeta(beta + 2.0, a);
            Complex64::new(0.0, s) * lead
        }
        // exponentially small
        KernelKind::QgswBessel => Complex64::new(0.0, 0.0),
    }
}

/// Street speed with its convergence metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreetSpeed {
    pub v: Complex64,
    /// Truncation half-width at which the estimate settled.
    pub k: usize,
    /// Difference between the last two tail-corrected estimates.
    pub error_bound: f64,
}

/// Infinite symmetric lattice sum for the street speed, within `tol`.
///
/// Doubles the truncation from 8 until two tail-corrected partial sums agree.
pub fn street_speed_sum(kernel: &RadialKernel, geom: &StreetGeometry, tol: f64) -> Result<StreetSpeed> {
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let estimate = |k: usize| street_speed_truncated(kernel, geom, k) + street_tail(kernel, geom, k);
    let mut k = 8;
    let mut prev = estimate(k);
    while 2 * k <= MAX_TRUNCATION {
        let next = estimate(2 * k);
        let diff = (next - prev).norm();
        // the estimates converge at least geometrically once the tail is asymptotic
        if diff <= 0.5 * tol {
            return Ok(StreetSpeed { v: next, k: 2 * k, error_bound: diff });
        }
        prev = next;
        k *= 2;
    }
    let achieved = (estimate(k) - estimate(k / 2)).norm();
    Err(Error::Convergence {
        message: format!("street speed sum reached K = {k} with bound {achieved:e} > tol {tol:e}"),
        history: vec![achieved],
        last_iterate: vec![prev.re, prev.im],
    })
}

/// Speed of a point in a single row `a + k l - i h`, `|k| <= K`, due to the
/// rest of the row. Cancels pairwise, so it is zero for every kernel.
pub fn single_row_velocity(kernel: &RadialKernel, a: f64, h: f64, l: f64, k_max: usize) -> f64 {
    let x = Complex64::new(a, -h);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=k_max {
        let kl = k as f64 * l;
        for y in [x + kl, x - kl] {
            acc += street_term(kernel, x - y);
        }
    }
    acc.norm()
}

/// Velocities `dz_m/dt = sum_{k != m} i gamma_k G'(r) (z_m - z_k) / r`.
pub fn point_velocities(kernel: &RadialKernel, z: &[Complex64], gamma: &[f64]) -> Vec<Complex64> {
    map_range(z.len(), |m| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, (&zk, &gk)) in z.iter().zip(gamma).enumerate() {
            if k != m {
                let d = z[m] - zk;
                let r = d.norm();
                acc += Complex64::new(0.0, gk * kernel.gp(r) / r) * d;
            }
        }
        acc
    })
}

fn min_pair_distance(z: &[Complex64]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

/// Classical RK4 for a point-vortex system; calls `observe(step, t, z)` after
/// every step (and once at `step = 0`). Aborts on near-collision.
pub fn integrate_points<F: FnMut(usize, f64, &[Complex64])>(
    kernel: &RadialKernel,
    z0: &[Complex64],
    gamma: &[f64],
    dt: f64,
    steps: usize,
    collision_distance: f64,
    mut observe: F,
) -> Result<Vec<Complex64>> {
    if z0.len() != gamma.len() {
        return Err(Error::Precondition("positions and strengths differ in length".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Precondition("time step must be positive".into()));
    }
    let (dmin, i, j) = min_pair_distance(z0);
    if dmin < collision_distance {
        return Err(Error::Degenerate(format!("initial points {i} and {j} are {dmin:e} apart")));
    }
    let mut z = z0.to_vec();
    observe(0, 0.0, &z);
    let n = z.len();
    for step in 1..=steps {
        let k1 = point_velocities(kernel, &z, gamma);
        let y: Vec<Complex64> = (0..n).map(|i| z[i] + 0.5 * dt * k1[i]).collect();
        let k2 = point_velocities(kernel, &y, gamma);
        let y: Vec<Complex64> = (0..n).map(|i| z[i] + 0.5 * dt * k2[i]).collect();
        let k3 = point_velocities(kernel, &y, gamma);
        let y: Vec<Complex64> = (0..n).map(|i| z[i] + dt * k3[i]).collect();
        let k4 = point_velocities(kernel, &y, gamma);
        for i in 0..n {
            z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let (dmin, i, j) = min_pair_distance(&z);
        if dmin < collision_distance || z.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::Degenerate(format!(
                "point collision at step {step} (t = {}): |z[{i}] - z[{j}]| = {dmin:e}, z[{i}] = {}, z[{j}] = {}",
                step as f64 * dt,
                z[i],
                z[j]
            )));
        }
        observe(step, step as f64 * dt, &z);
    }
    Ok(z)
}

/// Snapshot of a truncated lattice of `2K+1` points per row.
#[derive(Clone, Debug, PartialEq)]
pub struct PointLatticeState {
    pub t: f64,
    pub z_top: Vec<Complex64>,
    /// Empty for a single-row lattice.
    pub z_bot: Vec<Complex64>,
}

/// Trajectory of a truncated lattice with drift diagnostics.
#[derive(Clone, Debug)]
pub struct LatticeRun {
    pub k: usize,
    pub states: Vec<PointLatticeState>,
    /// Mean displacement velocity of the central 10% of the points.
    pub drift: Complex64,
    /// Displacement velocity of the central top-row point.
    pub center_drift: Complex64,
    /// Speed the truncated lattice has at `t = 0` at its central point.
    pub truncated_speed: Complex64,
}

fn lattice_run(
    kernel: &RadialKernel,
    top: Vec<Complex64>,
    bot: Vec<Complex64>,
    l: f64,
    k: usize,
    dt: f64,
    steps: usize,
) -> Result<LatticeRun> {
    if k < 8 {
        return Err(Error::Precondition(format!("lattice simulation needs K >= 8, got {k}")));
    }
    let n_top = top.len();
    let mut z = top;
    let mut gamma = vec![1.0; n_top];
    gamma.extend(std::iter::repeat(-1.0).take(bot.len()));
    z.extend(bot);
    let v0 = point_velocities(kernel, &z, &gamma);
    let mut states = Vec::with_capacity(steps + 1);
    let z0 = z.clone();
    let z_end = integrate_points(kernel, &z, &gamma, dt, steps, 1e-10 * l, |_, t, zs| {
        states.push(PointLatticeState { t, z_top: zs[..n_top].to_vec(), z_bot: zs[n_top..].to_vec() });
    })?;
    let t_end = dt * steps as f64;
    // central 10% of each row, symmetric about the middle index
    let half = ((2 * k + 1) / 20).max(0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    let rows = if z.len() > n_top { 2 } else { 1 };
    for row in 0..rows {
        for j in (k - half)..=(k + half) {
            let i = row * n_top + j;
            acc += (z_end[i] - z0[i]) / t_end;
            count += 1.0;
        }
    }
    Ok(LatticeRun {
        k,
        states,
        drift: acc / count,
        center_drift: (z_end[k] - z0[k]) / t_end,
        truncated_speed: v0[k],
    })
}

/// RK4 trajectory of the truncated street `|k| <= K`.
pub fn simulate_street(
    kernel: &RadialKernel,
    geom: &StreetGeometry,
    k: usize,
    dt: f64,
    steps: usize,
) -> Result<LatticeRun> {
    let idx = |j: usize| j as f64 - k as f64;
    let top = (0..=2 * k).map(|j| Complex64::new(idx(j) * geom.l, 0.0)).collect();
    let bot = (0..=2 * k).map(|j| geom.offset() + idx(j) * geom.l).collect();
    lattice_run(kernel, top, bot, geom.l, k, dt, steps)
}

/// RK4 trajectory of a single truncated row of positive vortices at `k l`.
pub fn simulate_row(kernel: &RadialKernel, l: f64, k: usize, dt: f64, steps: usize) -> Result<LatticeRun> {
    let top = (0..=2 * k).map(|j| Complex64::new((j as f64 - k as f64) * l, 0.0)).collect();
    lattice_run(kernel, top, Vec::new(), l, k, dt, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(l: f64, h: f64, a: f64) -> StreetGeometry {
        StreetGeometry::new(l, h, a).unwrap()
    }

    #[test]
    fn closed_form_reduces_to_coth_and_tanh() {
        let v = street_speed_closed_form(&geom(1.0, 1.0, 0.0));
        assert!((v.re - 0.5 / PI.tanh()).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert!((v.re - 0.5018709).abs() < 1e-7);
        let v = street_speed_closed_form(&geom(1.0, 1.0, 0.5));
        assert!((v.re - 0.5 * PI.tanh()).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert!((v.re - 0.4981360).abs() < 1e-7);
    }

    #[test]
    fn euler_sum_matches_closed_form() {
        let k = RadialKernel::euler();
        for &(h, a) in &[(1.0, 0.0), (1.0, 0.5), (0.4, 0.3), (-0.7, 0.1)] {
            let g = geom(1.0, h, a);
            let s = street_speed_sum(&k, &g, 1e-12).unwrap();
            assert!((s.v - street_speed_closed_form(&g)).norm() < 1e-11, "h {h} a {a}");
        }
    }

    #[test]
    fn general_stagger_has_vertical_component() {
        let g = geom(1.0, 1.0, 0.3);
        for k in [RadialKernel::euler(), RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()] {
            let s = street_speed_sum(&k, &g, 1e-10).unwrap();
            assert!(s.v.im.abs() > 1e-4, "{}", k.label());
        }
    }

    #[test]
    fn qgsw_partial_sums_decay_exponentially() {
        // the K = 20 vs 40 gap is dominated by the k = 21 pair, ~ K1(21 lambda l)
        let g = geom(1.0, 0.5, 0.0);
        let gap = |lambda: f64| {
            let k = RadialKernel::qgsw(lambda).unwrap();
            (street_speed_truncated(&k, &g, 20) - street_speed_truncated(&k, &g, 40)).norm()
        };
        // mpmath: 2.4206e-12 at lambda = 1, 4.06e-20 at lambda = 2
        assert!((gap(1.0) - 2.42056374947596e-12).abs() < 1e-15);
        assert!(gap(2.0) < 1e-19);
    }

    #[test]
    fn gsqg_sum_converges_with_tail() {
        let k = RadialKernel::gsqg(0.5).unwrap();
        let g = geom(1.0, 1.0, 0.0);
        let s = street_speed_sum(&k, &g, 1e-10).unwrap();
        let brute = street_speed_truncated(&k, &g, 400_000) + street_tail(&k, &g, 400_000);
        assert!((s.v - brute).norm() < 1e-10);
        assert!(s.v.im.abs() < 1e-12);
    }

    #[test]
    fn strength_scaling_is_linear() {
        // scaling every strength by kappa scales the speed by kappa: the sum is linear in G'
        let k = RadialKernel::euler();
        let g = geom(1.0, 1.0, 0.0);
        let v = street_speed_sum(&k, &g, 1e-12).unwrap().v;
        let mut scaled = Complex64::new(0.0, 0.0);
        let kappa = 2.5;
        let d0 = g.offset();
        for j in (1..=100_000).rev() {
            let kl = j as f64 * g.l;
            scaled += kappa * (street_term(&k, d0 + kl) + street_term(&k, d0 - kl));
        }
        scaled += kappa * street_term(&k, d0) + kappa * street_tail(&k, &g, 100_000);
        assert!((scaled - kappa * v).norm() < 1e-12);
    }

    #[test]
    fn two_vortex_examples() {
        let e = RadialKernel::euler();
        let one = Complex64::new(1.0, 0.0);
        match two_vortex_motion(1.0, 1.0, one, -one, &e).unwrap() {
            TwoVortexMotion::Rotation { omega } => assert!((omega - 0.25 / PI).abs() < 1e-16),
            other => panic!("{other:?}"),
        }
        match two_vortex_motion(1.0, -1.0, one, -one, &e).unwrap() {
            TwoVortexMotion::Translation { u } => assert!((u - Complex64::new(0.0, -0.25 / PI)).norm() < 1e-16),
            other => panic!("{other:?}"),
        }
        assert!(matches!(two_vortex_motion(1.0, 1.0, one, one, &e), Err(Error::Domain(_))));
        assert!(matches!(two_vortex_motion(1.0, 2.0, one, -one, &e), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_row_is_stationary() {
        for k in [RadialKernel::euler(), RadialKernel::qgsw(1.0).unwrap(), RadialKernel::gsqg(0.5).unwrap()] {
            assert!(single_row_velocity(&k, 0.3, 0.7, 1.0, 100) < 1e-15);
        }
    }

    #[test]
    fn collision_aborts() {
        let e = RadialKernel::euler();
        let z = [Complex64::new(0.0, 0.0), Complex64::new(1e-11, 0.0)];
        let r = integrate_points(&e, &z, &[1.0, 1.0], 1e-3, 1, 1e-10, |_, _, _| {});
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }
}
