//! Contour dynamics of a patch street: both rows advected by RK4.
//!
//! Patch `D1` carries vorticity `q0 = 1/(pi eps^2)` and `D2` carries `-q0`, each
//! repeated with period `l`, so
//! `v(x) = -q0 int_dD1 L(x - y) dy + q0 int_dD2 L(x - y) dy` with `L` the
//! periodized kernel. The integral over a node's own patch is singular and uses
//! the same product rules as the boundary functional.

use crate::boundary::SampledBoundary;
use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::kernels::{KernelKind, RadialKernel};
use crate::lattice::LatticeKernel;
use crate::point_street::StreetGeometry;
use crate::quadrature::{log_weights, power_weights, spectral_upsample};
use crate::solver::StreetSolution;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest admissible ratio of the longest to the shortest node spacing.
pub const MAX_SPACING_RATIO: f64 = 5.0;

/// Boundary nodes of both patches at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourState {
    pub t: f64,
    pub top: Vec<Complex64>,
    pub bottom: Vec<Complex64>,
}

impl ContourState {
    /// Street of a solved map sampled on `m` nodes; the bottom patch is the
    /// point reflection `-z + a - i h` of the top one.
    pub fn from_solution(sol: &StreetSolution, m: usize) -> Result<Self> {
        let map = crate::boundary::BoundaryMap::new(&sol.kernel, sol.eps, sol.coeffs.clone())?;
        let top = map.physical_boundary(Complex64::new(0.0, 0.0), m)?;
        Ok(ContourState::symmetric(&top, &sol.geom))
    }

    pub fn symmetric(top: &SampledBoundary, geom: &StreetGeometry) -> Self {
        ContourState { t: 0.0, top: top.nodes().to_vec(), bottom: top.partner(geom.a, geom.h).nodes().to_vec() }
    }

    pub fn top_boundary(&self) -> Result<SampledBoundary> {
        SampledBoundary::from_nodes(self.top.clone())
    }

    pub fn bottom_boundary(&self) -> Result<SampledBoundary> {
        SampledBoundary::from_nodes(self.bottom.clone())
    }

    /// Area of the top patch (Green's formula on the spectral curve).
    pub fn area(&self) -> Result<f64> {
        Ok(self.top_boundary()?.area())
    }

    pub fn centroid(&self) -> Result<Complex64> {
        Ok(self.top_boundary()?.centroid())
    }

    /// Departure from the glide reflection `z -> conj(z) + a - i h` that the
    /// street dynamics preserves: `max_j |bottom_{-j} - (conj(top_j) + a - i h)|`.
    ///
    /// For a left-right symmetric top patch this reflection agrees at `t = 0`
    /// with the point reflection used to build the bottom patch.
    pub fn symmetry_drift(&self, geom: &StreetGeometry) -> f64 {
        let shift = Complex64::new(geom.a, -geom.h);
        let m = self.top.len();
        (0..m).fold(0.0, |d, j| d.max((self.bottom[(m - j) % m] - (self.top[j].conj() + shift)).norm()))
    }
}

/// Velocity evaluator for one kernel, geometry and patch size.
#[derive(Clone, Debug)]
pub struct ContourDynamics {
    kernel: RadialKernel,
    geom: StreetGeometry,
    lattice: LatticeKernel,
    q0: f64,
    m: usize,
    weights: Vec<f64>,
}

impl ContourDynamics {
    /// `m` nodes per patch, vorticity `1/(pi eps^2)`.
    pub fn new(kernel: RadialKernel, geom: StreetGeometry, eps: f64, m: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Precondition(format!("patch size must be positive, got {eps}")));
        }
        if m < 16 || m % 2 != 0 {
            return Err(Error::Precondition(format!("need an even node count >= 16, got {m}")));
        }
        let weights = match kernel.kind() {
            KernelKind::GsqgPower => power_weights(kernel.beta(), m),
            _ => log_weights(m),
        };
        Ok(ContourDynamics { kernel, geom, lattice: LatticeKernel::new(kernel, geom.l), q0: 1.0 / (PI * eps * eps), m, weights })
    }

    pub fn nodes_per_patch(&self) -> usize {
        self.m
    }

    /// `int_own L(x_i - y) dy` at every node of `own`.
    fn self_integral(&self, own: &SampledBoundary, i: usize) -> Complex64 {
        let m = self.m;
        let h = 2.0 * PI / m as f64;
        let (y, dy) = (own.nodes(), own.derivs());
        let x = y[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let d = (i + m - j) % m;
            let diff = x - y[j];
            let r = diff.norm();
            // r = Q rho with rho = |2 sin((t_i - t_j)/2)|, Q smooth and positive
            let q = if i == j { dy[i].norm() } else { r / (2.0 * (PI * d as f64 / m as f64).sin()).abs() };
            let singular = match self.kernel.kind() {
                KernelKind::GsqgPower => self.weights[d] * self.kernel.prefactor() * q.powf(-self.kernel.beta()),
                _ => {
                    let (a, b) = self.kernel.log_split(r);
                    self.weights[d] * a + h * (a * q.ln() + b)
                }
            };
            let images = if i == j { self.lattice.regular(Complex64::new(0.0, 0.0)) } else { self.lattice.regular(diff) };
            acc += (singular + h * images) * dy[j];
        }
        acc
    }

    /// `int_other L(x - y) dy` by the trapezoid rule.
    fn other_integral(&self, other: &SampledBoundary, x: Complex64) -> Complex64 {
        let h = 2.0 * PI / self.m as f64;
        other.nodes().iter().zip(other.derivs()).map(|(y, dy)| self.lattice.full(x - y) * dy).sum::<Complex64>() * h
    }

    /// Velocities at the nodes of the top and bottom patches.
    pub fn boundary_velocity(&self, state: &ContourState) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if state.top.len() != self.m || state.bottom.len() != self.m {
            return Err(Error::Precondition(format!("expected {} nodes per patch", self.m)));
        }
        let top = state.top_boundary()?;
        let bottom = state.bottom_boundary()?;
        for (name, b) in [("top", &top), ("bottom", &bottom)] {
            let (lo, hi) = b.spacing();
            if !(lo > 0.0) || hi > MAX_SPACING_RATIO * lo {
                return Err(Error::Degenerate(format!(
                    "{name} patch node spacing ratio {:.3} exceeds {MAX_SPACING_RATIO}; remeshing required",
                    hi / lo
                )));
            }
        }
        let m = self.m;
        let v = map_range(2 * m, |k| {
            if k < m {
                -self.q0 * self.self_integral(&top, k) + self.q0 * self.other_integral(&bottom, top.nodes()[k])
            } else {
                let i = k - m;
                -self.q0 * self.other_integral(&top, bottom.nodes()[i]) + self.q0 * self.self_integral(&bottom, i)
            }
        });
        let (a, b) = v.split_at(m);
        Ok((a.to_vec(), b.to_vec()))
    }

    /// Normal velocity `Re[conj(v - V) n]` on the top patch, `n` the outward unit normal.
    pub fn normal_flux(&self, state: &ContourState, v_frame: f64) -> Result<Vec<f64>> {
        let (vt, _) = self.boundary_velocity(state)?;
        let top = state.top_boundary()?;
        Ok(vt
            .iter()
            .zip(top.derivs())
            .map(|(v, d)| {
                let n = -Complex64::i() * d / d.norm();
                ((v - v_frame).conj() * n).re
            })
            .collect())
    }

    /// Advances `state` by one classical RK4 step.
    pub fn step(&self, state: &ContourState, dt: f64) -> Result<ContourState> {
        let shift = |s: &ContourState, k: &(Vec<Complex64>, Vec<Complex64>), c: f64| ContourState {
            t: s.t + c,
            top: s.top.iter().zip(&k.0).map(|(z, v)| z + c * v).collect(),
            bottom: s.bottom.iter().zip(&k.1).map(|(z, v)| z + c * v).collect(),
        };
        let k1 = self.boundary_velocity(state)?;
        let k2 = self.boundary_velocity(&shift(state, &k1, 0.5 * dt))?;
        let k3 = self.boundary_velocity(&shift(state, &k2, 0.5 * dt))?;
        let k4 = self.boundary_velocity(&shift(state, &k3, dt))?;
        Ok(ContourState {
            t: state.t + dt,
            top: rk4_combine(&state.top, [&k1.0, &k2.0, &k3.0, &k4.0], dt),
            bottom: rk4_combine(&state.bottom, [&k1.1, &k2.1, &k3.1, &k4.1], dt),
        })
    }

    /// Runs `steps` RK4 steps, recording diagnostics each step and the state every
    /// `record_every` steps. Shape deviation is measured against the initial contour
    /// translated by `v_frame t`.
    pub fn evolve(&self, state: &ContourState, dt: f64, steps: usize, v_frame: f64, record_every: usize) -> Result<EvolutionRun> {
        let (vt, vb) = self.boundary_velocity(state)?;
        let vmax = vt.iter().chain(&vb).fold(0.0f64, |m, v| m.max(v.norm()));
        let min_spacing = state.top_boundary()?.spacing().0.min(state.bottom_boundary()?.spacing().0);
        if !(dt > 0.0) || dt * vmax >= 0.25 * min_spacing {
            return Err(Error::Precondition(format!(
                "time step too large: dt max|v| = {:e} must stay below a quarter node spacing {:e}",
                dt * vmax,
                0.25 * min_spacing
            )));
        }
        let reference = ShapeReference::new(&state.top)?;
        let area0 = state.area()?;
        let mut run = EvolutionRun {
            states: vec![state.clone()],
            diagnostics: vec![Diagnostics::measure(state, &reference, v_frame, &self.geom)?],
            abort: None,
            initial_area: area0,
        };
        let record_every = record_every.max(1);
        let mut current = state.clone();
        for k in 1..=steps {
            let next = match self.step(&current, dt) {
                Ok(s) => s,
                Err(e) => {
                    run.abort = Some(e);
                    run.states.push(current);
                    return Ok(run);
                }
            };
            current = next;
            if k % 16 == 0 || k == steps {
                let b = current.top_boundary()?;
                if !b.is_simple() {
                    run.abort = Some(Error::Degenerate(format!("top contour self-intersects at t = {}", current.t)));
                    run.states.push(current);
                    return Ok(run);
                }
            }
            run.diagnostics.push(Diagnostics::measure(&current, &reference, v_frame, &self.geom)?);
            if k % record_every == 0 || k == steps {
                run.states.push(current.clone());
            }
        }
        Ok(run)
    }
}

fn rk4_combine(z: &[Complex64], k: [&Vec<Complex64>; 4], dt: f64) -> Vec<Complex64> {
    (0..z.len()).map(|i| z[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i])).collect()
}

/// Per-step measurements of an evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub area: f64,
    pub centroid: Complex64,
    /// Largest distance of a top node to the initial contour moved by `V t`.
    pub shape_dev: f64,
    /// Departure of the bottom patch from the reflection of the top one.
    pub symmetry_drift: f64,
}

impl Diagnostics {
    fn measure(s: &ContourState, reference: &ShapeReference, v_frame: f64, geom: &StreetGeometry) -> Result<Self> {
        let b = s.top_boundary()?;
        let shift = Complex64::new(v_frame * s.t, 0.0);
        let shape_dev = s.top.iter().fold(0.0f64, |m, z| m.max(reference.distance(z - shift)));
        Ok(Diagnostics { t: s.t, area: b.area(), centroid: b.centroid(), shape_dev, symmetry_drift: s.symmetry_drift(geom) })
    }
}

/// Densely resampled initial contour for point-to-curve distances.
struct ShapeReference {
    poly: Vec<Complex64>,
}

impl ShapeReference {
    const UPSAMPLE: usize = 16;

    fn new(nodes: &[Complex64]) -> Result<Self> {
        Ok(ShapeReference { poly: spectral_upsample(nodes, Self::UPSAMPLE) })
    }

    fn distance(&self, p: Complex64) -> f64 {
        let n = self.poly.len();
        let mut best = f64::INFINITY;
        for k in 0..n {
            let (a, b) = (self.poly[k], self.poly[(k + 1) % n]);
            let ab = b - a;
            let t = (((p - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            best = best.min((p - (a + t * ab)).norm());
        }
        best
    }
}

/// Recorded trajectory of an evolution.
#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub states: Vec<ContourState>,
    /// One entry per step, starting at the initial state.
    pub diagnostics: Vec<Diagnostics>,
    /// Set when the run stopped early; the last recorded state is the dump.
    pub abort: Option<Error>,
    pub initial_area: f64,
}

impl EvolutionRun {
    pub fn final_diagnostics(&self) -> &Diagnostics {
        self.diagnostics.last().expect("runs hold the initial diagnostics")
    }

    /// `(centroid(T) - centroid(0)) / T`.
    pub fn centroid_velocity(&self) -> Complex64 {
        let (a, b) = (self.diagnostics[0], *self.final_diagnostics());
        if b.t == a.t {
            return Complex64::new(0.0, 0.0);
        }
        (b.centroid - a.centroid) / (b.t - a.t)
    }

    /// `max |A(t) - A(0)| / A(0)`.
    pub fn area_drift(&self) -> f64 {
        self.diagnostics.iter().fold(0.0f64, |m, d| m.max((d.area - self.initial_area).abs())) / self.initial_area
    }

    pub fn max_shape_deviation(&self) -> f64 {
        self.diagnostics.iter().fold(0.0f64, |m, d| m.max(d.shape_dev))
    }

    pub fn max_symmetry_drift(&self) -> f64 {
        self.diagnostics.iter().fold(0.0f64, |m, d| m.max(d.symmetry_drift))
    }
}

/// Time-step convergence of the centroid velocity over `[0, window]`.
///
/// Runs with `steps`, `2 steps` and `4 steps` and returns
/// `|c1 - c2| / |c2 - c4|`, which tends to 16 for a fourth-order scheme.
pub fn centroid_order_ratio(
    dynamics: &ContourDynamics,
    state: &ContourState,
    window: f64,
    steps: usize,
    v_frame: f64,
) -> Result<f64> {
    let mut c = Vec::with_capacity(3);
    for k in 0..3 {
        let n = steps << k;
        let run = dynamics.evolve(state, window / n as f64, n, v_frame, n)?;
        if let Some(e) = run.abort {
            return Err(e);
        }
        c.push(run.centroid_velocity());
    }
    let fine = (c[1] - c[2]).norm();
    if fine == 0.0 {
        return Err(Error::Degenerate("centroid velocity is independent of the step".into()));
    }
    Ok((c[0] - c[1]).norm() / fine)
}

/// Convenience wrapper: velocity of every node of `state`.
pub fn boundary_velocity(
    kernel: &RadialKernel,
    geom: &StreetGeometry,
    eps: f64,
    state: &ContourState,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    ContourDynamics::new(*kernel, *geom, eps, state.top.len())?.boundary_velocity(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour_functional::Functional;
    use crate::solver::{solve_at_eps, NewtonOptions};

    fn euler_solution(eps: f64) -> StreetSolution {
        let g = StreetGeometry::new(1.0, 1.0, 0.0).unwrap();
        let f = Functional::new(RadialKernel::euler(), g, 12, 64).unwrap();
        solve_at_eps(&f, eps, &[0.0; 12], &NewtonOptions::default()).unwrap()
    }

    #[test]
    fn solved_street_has_no_normal_flux() {
        let sol = euler_solution(0.05);
        let dynamics = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, 64).unwrap();
        let state = ContourState::from_solution(&sol, 64).unwrap();
        let flux = dynamics.normal_flux(&state, sol.v).unwrap();
        assert!(flux.iter().all(|f| f.abs() < 1e-8), "{:e}", flux.iter().fold(0.0f64, |m, f| m.max(f.abs())));
    }

    #[test]
    fn lone_circle_row_feels_only_the_image_strain() {
        // far partner row: drift coth(pi h / l) / (2 l) = 1/2; the own-row images add the
        // strain -(pi x conj)/(6 i l^2), so the normal flux is -(pi eps / 6 l^2) sin(2 theta) + O(eps^3)
        let g = StreetGeometry::new(1.0, 1e3, 0.0).unwrap();
        let eps = 0.01;
        let m = 64;
        let top = SampledBoundary::circle(Complex64::new(0.0, 0.0), eps, m).unwrap();
        let state = ContourState::symmetric(&top, &g);
        let d = ContourDynamics::new(RadialKernel::euler(), g, eps, m).unwrap();
        let flux = d.normal_flux(&state, 0.5).unwrap();
        let amp = PI * eps / 6.0;
        for (j, f) in flux.iter().enumerate() {
            let want = -amp * (4.0 * PI * j as f64 / m as f64).sin();
            assert!((f - want).abs() < 1e-3 * amp, "node {j}: {f} vs {want}");
        }
        let (v, _) = d.boundary_velocity(&state).unwrap();
        // Rankine rim speed plus the tangential strain -pi eps / 6 at theta = 0
        assert!(((v[0] - 0.5).norm() - (1.0 / (2.0 * PI * eps) - amp)).abs() < 1e-3 * amp);
    }

    #[test]
    fn velocity_is_periodic_under_translation() {
        let sol = euler_solution(0.03);
        let d = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, 64).unwrap();
        let s = ContourState::from_solution(&sol, 64).unwrap();
        let moved = ContourState {
            t: 0.0,
            top: s.top.iter().map(|z| z + 1.0).collect(),
            bottom: s.bottom.clone(),
        };
        let (a, _) = d.boundary_velocity(&s).unwrap();
        let (b, _) = d.boundary_velocity(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn short_run_translates_and_conserves_area() {
        let sol = euler_solution(0.05);
        let d = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, 64).unwrap();
        let s = ContourState::from_solution(&sol, 64).unwrap();
        let run = d.evolve(&s, 2e-4, 50, sol.v, 10).unwrap();
        assert!(run.abort.is_none());
        assert!((run.centroid_velocity().re - sol.v).abs() < 1e-6 * sol.v.abs());
        assert!(run.area_drift() < 1e-9);
        assert!(run.max_symmetry_drift() < 1e-8);
        assert!(run.max_shape_deviation() < 1e-6);
    }

    #[test]
    fn rk4_centroid_error_shrinks_sixteenfold() {
        let sol = euler_solution(0.05);
        let d = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, 64).unwrap();
        let s = ContourState::from_solution(&sol, 64).unwrap();
        let ratio = centroid_order_ratio(&d, &s, 0.02, 125, sol.v).unwrap();
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn oversized_step_is_rejected() {
        let sol = euler_solution(0.05);
        let d = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, 64).unwrap();
        let s = ContourState::from_solution(&sol, 64).unwrap();
        assert!(matches!(d.evolve(&s, 1e-2, 1, sol.v, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn clustered_nodes_require_remeshing() {
        let g = StreetGeometry::new(1.0, 1.0, 0.0).unwrap();
        let nodes: Vec<Complex64> =
            (0..32).map(|j| { let t = 2.0 * PI * (j as f64 / 32.0).powi(3); Complex64::from_polar(0.05, t) }).collect();
        let top = SampledBoundary::from_nodes(nodes).unwrap();
        let state = ContourState::symmetric(&top, &g);
        let d = ContourDynamics::new(RadialKernel::euler(), g, 0.05, 32).unwrap();
        assert!(matches!(d.boundary_velocity(&state), Err(Error::Degenerate(_))));
    }
}
