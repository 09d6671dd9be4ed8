//! Newton solve of the residual in the map coefficients, and continuation in `eps`.
//!
//! Unknowns are `a_1..a_N`, equations the sine modes `2..N+1`: the linearization
//! at the point-vortex limit pairs `a_n` with `sin((n+1) theta)`, so the system is
//! square and diagonally dominant near `eps = 0`.

use crate::contour_functional::Functional;
use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::kernels::{KernelKind, RadialKernel};
use crate::point_street::StreetGeometry;
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;

/// Newton iteration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Converged when `max |mode| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference column step.
    pub fd_step: f64,
    /// Step halvings allowed when a Newton step leaves the admissible ball.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-11, max_iter: 25, fd_step: 1e-7, max_halvings: 5 }
    }
}

/// A converged translating street.
#[derive(Clone, Debug, PartialEq)]
pub struct StreetSolution {
    pub kernel: RadialKernel,
    pub geom: StreetGeometry,
    pub eps: f64,
    pub coeffs: Vec<f64>,
    pub v: f64,
    /// Point-street speed at the same geometry.
    pub v0: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub grid: usize,
    /// Residual max-norm before each iteration and at convergence.
    pub history: Vec<f64>,
}

impl StreetSolution {
    /// `max_n |a_n|`.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `r_{k+1} / r_k^2` over the last two Newton steps, when both are informative.
    pub fn quadratic_constant(&self) -> Option<f64> {
        let n = self.history.len();
        if n < 3 {
            return None;
        }
        let (a, b) = (self.history[n - 2], self.history[n - 1]);
        (a > 0.0 && b > 0.0).then(|| b / (a * a))
    }

    /// Flat `key = value` record, floats with 17 significant digits.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kernel = {}", self.kernel.kind().id());
        match self.kernel.kind() {
            KernelKind::QgswBessel => {
                let _ = writeln!(s, "lambda = {}", fmt17(self.kernel.lambda()));
            }
            KernelKind::GsqgPower => {
                let _ = writeln!(s, "beta = {}", fmt17(self.kernel.beta()));
            }
            KernelKind::EulerLog => {}
        }
        for (k, v) in [("l", self.geom.l), ("h", self.geom.h), ("a", self.geom.a), ("eps", self.eps)] {
            let _ = writeln!(s, "{k} = {}", fmt17(v));
        }
        let _ = writeln!(s, "N = {}", self.coeffs.len());
        let _ = writeln!(s, "M = {}", self.grid);
        let _ = writeln!(s, "V = {}", fmt17(self.v));
        let _ = writeln!(s, "V0 = {}", fmt17(self.v0));
        let _ = writeln!(s, "residual_norm = {}", fmt17(self.residual_norm));
        let _ = writeln!(s, "newton_iters = {}", self.newton_iters);
        for (i, a) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "a_{} = {}", i + 1, fmt17(*a));
        }
        s
    }

    /// Parses a record written by [`StreetSolution::to_record`].
    pub fn from_record(text: &str) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("record line {}: expected `key = value`", no + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| map.get(k).ok_or_else(|| Error::Domain(format!("record is missing `{k}`")));
        let num = |k: &str| -> Result<f64> {
            get(k)?.parse::<f64>().map_err(|e| Error::Domain(format!("record key `{k}`: {e}")))
        };
        let int = |k: &str| -> Result<usize> {
            get(k)?.parse::<usize>().map_err(|e| Error::Domain(format!("record key `{k}`: {e}")))
        };
        let kernel = match get("kernel")?.as_str() {
            "euler" => RadialKernel::euler(),
            "qgsw" => RadialKernel::qgsw(num("lambda")?)?,
            "gsqg" => RadialKernel::gsqg(num("beta")?)?,
            other => return Err(Error::Domain(format!("unknown kernel `{other}` in record"))),
        };
        let n = int("N")?;
        let coeffs = (1..=n).map(|i| num(&format!("a_{i}"))).collect::<Result<Vec<_>>>()?;
        let residual_norm = num("residual_norm")?;
        Ok(StreetSolution {
            kernel,
            geom: StreetGeometry::new(num("l")?, num("h")?, num("a")?)?,
            eps: num("eps")?,
            coeffs,
            v: num("V")?,
            v0: num("V0")?,
            residual_norm,
            newton_iters: int("newton_iters")?,
            grid: int("M")?,
            history: vec![residual_norm],
        })
    }
}

/// Shortest round-trip form is not fixed-width; records use 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Largest admissible `eps`: `min(1, l/4)`.
pub fn eps_bound(geom: &StreetGeometry) -> f64 {
    (0.25 * geom.l).min(1.0)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `F(eps, f) = 0` by Newton's method from `init`.
///
/// The Jacobian is rebuilt by finite differences at every iterate, except that
/// an iteration starting from `f = 0` uses the analytic limit Jacobian.
pub fn solve_at_eps(fnl: &Functional, eps: f64, init: &[f64], opts: &NewtonOptions) -> Result<StreetSolution> {
    let bound = eps_bound(fnl.geometry());
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::Precondition(format!("eps must lie in (0, min(1, l/4)) = (0, {bound}), got {eps}")));
    }
    let n = fnl.modes();
    let mut x = init.to_vec();
    let mut r = fnl.residual_modes(eps, &x)?.modes;
    let mut history = vec![max_abs(&r)];
    let fail = |message: String, history: &[f64], x: &[f64]| Error::Convergence {
        message,
        history: history.to_vec(),
        last_iterate: x.to_vec(),
    };
    for iter in 0..=opts.max_iter {
        if max_abs(&r) < opts.tol {
            return Ok(StreetSolution {
                kernel: *fnl.kernel(),
                geom: *fnl.geometry(),
                eps,
                v: fnl.v_of(&fnl.map(eps, x.clone())?)?,
                v0: fnl.v0(),
                coeffs: x,
                residual_norm: max_abs(&r),
                newton_iters: iter,
                grid: fnl.grid(),
                history,
            });
        }
        if iter == opts.max_iter {
            break;
        }
        let jac = if x.iter().all(|a| *a == 0.0) {
            DMatrix::from_diagonal(&DVector::from_vec(fnl.limit_jacobian()))
        } else {
            fd_jacobian(fnl, eps, &x, &r, opts.fd_step)?
        };
        let dx = jac
            .lu()
            .solve(&DVector::from_iterator(n, r.iter().map(|v| -v)))
            .ok_or_else(|| fail(format!("singular Jacobian at eps = {eps}"), &history, &x))?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + t * d).collect();
            match fnl.residual_modes(eps, &trial) {
                Ok(res) => {
                    accepted = Some((trial, res.modes));
                    break;
                }
                Err(Error::Domain(_)) => t *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let (nx, nr) = accepted.ok_or_else(|| {
            fail(format!("Newton step left the admissible ball after {} halvings", opts.max_halvings), &history, &x)
        })?;
        x = nx;
        r = nr;
        history.push(max_abs(&r));
    }
    Err(fail(
        format!("no convergence to {:e} in {} iterations at eps = {eps}", opts.tol, opts.max_iter),
        &history,
        &x,
    ))
}

/// Forward-difference Jacobian `d modes / d a`, columns evaluated independently.
pub fn fd_jacobian(fnl: &Functional, eps: f64, x: &[f64], r: &[f64], step: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let cols = map_range(n, |k| {
        let mut xp = x.to_vec();
        xp[k] += step;
        fnl.residual_modes(eps, &xp).map(|m| m.modes)
    });
    let mut jac = DMatrix::zeros(r.len(), n);
    for (k, col) in cols.into_iter().enumerate() {
        let col = col?;
        for (i, v) in col.iter().enumerate() {
            jac[(i, k)] = (v - r[i]) / step;
        }
    }
    Ok(jac)
}

/// Step-size policy for [`continue_in_eps`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationPolicy {
    pub eps_start: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Double the step after a solve needing at most this many iterations.
    pub fast_iters: usize,
    pub newton: NewtonOptions,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        ContinuationPolicy { eps_start: 1e-4, initial_step: 1e-4, min_step: 1e-6, fast_iters: 2, newton: NewtonOptions::default() }
    }
}

/// Why a continuation stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    ReachedTarget,
    /// The step fell below the floor; carries the last error message.
    StepFloor { eps: f64, reason: String },
}

/// A branch of solutions at increasing `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationRun {
    pub solutions: Vec<StreetSolution>,
    /// Attempted steps `(eps, step, accepted)` in order.
    pub steps: Vec<(f64, f64, bool)>,
    pub termination: Termination,
}

impl ContinuationRun {
    /// Sub-run holding only the solutions at the given `eps` values.
    pub fn restricted(&self, eps: &[f64]) -> ContinuationRun {
        ContinuationRun {
            solutions: self.solutions.iter().filter(|s| eps.contains(&s.eps)).cloned().collect(),
            steps: self.steps.clone(),
            termination: self.termination.clone(),
        }
    }

    /// CSV summary `eps,V,max_abs_coeff,iters`.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("eps,V,max_abs_coeff,iters\n");
        for sol in &self.solutions {
            let _ = writeln!(s, "{},{},{},{}", fmt17(sol.eps), fmt17(sol.v), fmt17(sol.max_coeff()), sol.newton_iters);
        }
        s
    }
}

/// Continues the branch from `policy.eps_start` (zero coefficients) to `eps_target`.
///
/// Each solve starts from a linear extrapolation of the last two solutions.
/// A step is doubled after a fast solve and halved after a failure; below
/// `min_step` the partial branch is returned with the reason.
pub fn continue_in_eps(fnl: &Functional, eps_target: f64, policy: &ContinuationPolicy) -> Result<ContinuationRun> {
    continue_through(fnl, &[eps_target], policy)
}

/// Like [`continue_in_eps`], with steps clipped so the branch lands exactly on
/// every checkpoint (increasing, the last one being the target).
pub fn continue_through(fnl: &Functional, checkpoints: &[f64], policy: &ContinuationPolicy) -> Result<ContinuationRun> {
    let bound = eps_bound(fnl.geometry());
    let eps_target = *checkpoints.last().ok_or_else(|| Error::Precondition("no continuation target".into()))?;
    if !(eps_target < bound) {
        return Err(Error::Precondition(format!("eps_target must be below min(1, l/4) = {bound}, got {eps_target}")));
    }
    if checkpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("checkpoints must increase".into()));
    }
    if !(policy.eps_start > 0.0 && policy.eps_start <= checkpoints[0]) {
        return Err(Error::Precondition(format!(
            "continuation needs 0 < eps_start <= first checkpoint, got {} and {}",
            policy.eps_start, checkpoints[0]
        )));
    }
    let mut steps = Vec::new();
    let first = solve_at_eps(fnl, policy.eps_start, &vec![0.0; fnl.modes()], &policy.newton)?;
    steps.push((policy.eps_start, policy.eps_start, true));
    let mut solutions = vec![first];
    let mut step = policy.initial_step;
    loop {
        let last = solutions.last().expect("branch is never empty");
        let Some(&next_stop) = checkpoints.iter().find(|&&c| c > last.eps) else {
            return Ok(ContinuationRun { solutions, steps, termination: Termination::ReachedTarget });
        };
        let eps = (last.eps + step).min(next_stop);
        let guess = predict(&solutions, eps);
        match solve_at_eps(fnl, eps, &guess, &policy.newton) {
            Ok(sol) => {
                steps.push((eps, step, true));
                if sol.newton_iters <= policy.fast_iters {
                    step *= 2.0;
                }
                solutions.push(sol);
            }
            Err(e @ (Error::Convergence { .. } | Error::Domain(_) | Error::Degenerate(_))) => {
                steps.push((eps, step, false));
                step *= 0.5;
                if step < policy.min_step {
                    return Ok(ContinuationRun {
                        solutions,
                        steps,
                        termination: Termination::StepFloor { eps, reason: e.to_string() },
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Linear extrapolation in `eps` through the last two solutions.
fn predict(branch: &[StreetSolution], eps: f64) -> Vec<f64> {
    let last = &branch[branch.len() - 1];
    if branch.len() < 2 {
        return last.coeffs.clone();
    }
    let prev = &branch[branch.len() - 2];
    let t = (eps - last.eps) / (last.eps - prev.eps);
    last.coeffs.iter().zip(&prev.coeffs).map(|(a, b)| a + t * (a - b)).collect()
}

/// Empirical behavior of a branch as `eps -> 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    /// Least-squares slope of `ln|V - V0|` against `ln eps`.
    pub order: f64,
    /// `(eps, |V - V0|, max |a_n|)` per entry.
    pub entries: Vec<(f64, f64, f64)>,
    /// `max |a_n|` is nondecreasing in `eps` along the branch.
    pub coeffs_shrink: bool,
    /// Offsets below this are rounding noise and are left out of the fit.
    pub noise_floor: f64,
    /// Every speed is finite (speeds are real by construction).
    pub speeds_finite: bool,
}

/// Fits `|V(eps) - V0| ~ C eps^p` over the branch.
pub fn verify_limit(run: &ContinuationRun) -> Result<LimitReport> {
    let sols = &run.solutions;
    if sols.len() < 4 {
        return Err(Error::Precondition(format!("need at least 4 solutions, got {}", sols.len())));
    }
    let (lo, hi) = (sols[0].eps, sols[sols.len() - 1].eps);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("branch spans [{lo:e}, {hi:e}], less than a decade")));
    }
    let entries: Vec<(f64, f64, f64)> = sols.iter().map(|s| (s.eps, (s.v - s.v0).abs(), s.max_coeff())).collect();
    let noise_floor = 1e3 * f64::EPSILON * sols.iter().fold(1.0f64, |m, s| m.max(s.v0.abs()));
    let pts: Vec<(f64, f64)> = entries.iter().filter(|e| e.1 > noise_floor).map(|e| (e.0.ln(), e.1.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate("speed offsets are at rounding level; no order can be fitted".into()));
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let coeffs_shrink = entries.windows(2).all(|w| w[0].2 <= w[1].2);
    Ok(LimitReport { order: sxy / sxx, coeffs_shrink, noise_floor, speeds_finite: sols.iter().all(|s| s.v.is_finite()), entries })
}
