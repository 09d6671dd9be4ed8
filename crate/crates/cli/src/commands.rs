//! One function per subcommand. Each writes its files into the output
//! directory, prints a short report and returns the invariant checks.

use crate::config::{FieldSource, PointsMode, RunConfig};
use crate::error::CliError;
use crate::output::{num, svg, Checks, OutDir, Polyline};
use karman_core::boundary::{BoundaryMap, SampledBoundary};
use karman_core::contour_functional::{h6_coefficient, linearized_modes_euler, Functional};
use karman_core::evolution::{ContourDynamics, ContourState};
use karman_core::kernels::{bessel_k0, bessel_k1};
use karman_core::periodic_field::StreetField;
use karman_core::point_street::{
    integrate_points, simulate_row, simulate_street, street_speed_closed_form, street_speed_sum, street_speed_truncated,
    two_vortex_motion, TwoVortexMotion,
};
use karman_core::quadrature::adaptive_integrate;
use karman_core::solver::{
    continue_in_eps, continue_through, fd_jacobian, verify_limit, ContinuationPolicy, ContinuationRun, NewtonOptions,
    StreetSolution, Termination,
};
use karman_core::{Complex64, Error, KernelKind};
use std::f64::consts::PI;

pub fn point_speed(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let kernel = cfg.kernel()?;
    let geom = cfg.geometry()?;
    let sum = street_speed_sum(&kernel, &geom, cfg.speed.tol)?;
    let mut rows = vec![vec!["lattice_sum".into(), sum.k.to_string(), num(sum.v.re), num(sum.v.im), num(sum.error_bound)]];
    println!("{:<14} {:>8} {:>25} {:>25}", "method", "K", "Re V0", "Im V0");
    println!("{:<14} {:>8} {:>25} {:>25}", "lattice_sum", sum.k, num(sum.v.re), num(sum.v.im));
    for &k in &cfg.speed.partial_sums {
        let v = street_speed_truncated(&kernel, &geom, k);
        println!("{:<14} {:>8} {:>25} {:>25}", "partial_sum", k, num(v.re), num(v.im));
        rows.push(vec!["partial_sum".into(), k.to_string(), num(v.re), num(v.im), String::new()]);
    }
    let mut checks = Checks::default();
    if kernel.kind() == KernelKind::EulerLog {
        let closed = street_speed_closed_form(&geom);
        let diff = (closed - sum.v).norm();
        println!("{:<14} {:>8} {:>25} {:>25}", "closed_form", "", num(closed.re), num(closed.im));
        println!("discrepancy {}", num(diff));
        rows.push(vec!["closed_form".into(), String::new(), num(closed.re), num(closed.im), String::new()]);
        checks.add("closed_form_agreement", diff <= cfg.speed.agreement_tol, format!("|closed - sum| = {diff:e}"));
    }
    if geom.is_symmetric() {
        checks.add("imaginary_part_vanishes", sum.v.im.abs() < 1e-12, format!("Im V0 = {:e}", sum.v.im));
    }
    out.write_csv("point_speed.csv", &["method", "K", "re", "im", "error_bound"], &rows)?;
    Ok(checks)
}

fn continuation(cfg: &RunConfig) -> Result<(Functional, ContinuationRun), CliError> {
    let s = &cfg.solve;
    let fnl = Functional::new(cfg.kernel()?, cfg.geometry()?, s.modes, s.grid)?;
    let policy = ContinuationPolicy {
        eps_start: s.eps_start,
        initial_step: s.initial_step,
        min_step: s.min_step,
        fast_iters: 2,
        newton: NewtonOptions { tol: s.newton_tol, max_iter: s.max_iter, fd_step: s.fd_step, max_halvings: 5 },
    };
    let run = if s.checkpoints.is_empty() {
        continue_in_eps(&fnl, s.eps, &policy)?
    } else {
        continue_through(&fnl, &s.checkpoints, &policy)?
    };
    Ok((fnl, run))
}

fn stalled(run: &ContinuationRun) -> Option<CliError> {
    match &run.termination {
        Termination::ReachedTarget => None,
        Termination::StepFloor { eps, reason } => Some(CliError::Core(Error::Convergence {
            message: format!("continuation stalled at eps = {eps}: {reason}"),
            history: Vec::new(),
            last_iterate: run.solutions.last().map(|s| s.coeffs.clone()).unwrap_or_default(),
        })),
    }
}

fn solved(cfg: &RunConfig) -> Result<(ContinuationRun, StreetSolution), CliError> {
    let (_, run) = continuation(cfg)?;
    if let Some(e) = stalled(&run) {
        return Err(e);
    }
    let sol = run.solutions.last().cloned().ok_or_else(|| CliError::Core(Error::Degenerate("empty branch".into())))?;
    Ok((run, sol))
}

fn contour(sol: &StreetSolution, m: usize) -> Result<(SampledBoundary, SampledBoundary), CliError> {
    let map = BoundaryMap::new(&sol.kernel, sol.eps, sol.coeffs.clone())?;
    let top = map.physical_boundary(Complex64::new(0.0, 0.0), m)?;
    let bottom = top.partner(sol.geom.a, sol.geom.h);
    Ok((top, bottom))
}

fn polyline(nodes: &[Complex64], shift: f64, color: &'static str) -> Polyline {
    Polyline { points: nodes.iter().map(|z| (z.re + shift, z.im)).collect(), closed: true, color }
}

fn boundary_rows(label: &str, nodes: &[Complex64], rows: &mut Vec<Vec<String>>) {
    for (j, z) in nodes.iter().enumerate() {
        rows.push(vec![label.to_string(), j.to_string(), num(z.re), num(z.im)]);
    }
}

pub fn solve_street(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let (_, run) = continuation(cfg)?;
    out.write_text("branch.csv", &run.summary_csv())?;
    if let Some(e) = stalled(&run) {
        return Err(e);
    }
    let sol = run.solutions.last().expect("a finished branch holds its target");
    out.write_text("solution.txt", &sol.to_record())?;
    let (top, bottom) = contour(sol, cfg.solve.contour_points)?;
    let mut rows = Vec::new();
    boundary_rows("top", top.nodes(), &mut rows);
    boundary_rows("bottom", bottom.nodes(), &mut rows);
    out.write_csv("contour.csv", &["patch", "j", "x", "y"], &rows)?;
    let l = sol.geom.l;
    let lines: Vec<Polyline> = (-1..=1)
        .flat_map(|k| [polyline(top.nodes(), k as f64 * l, "red"), polyline(bottom.nodes(), k as f64 * l, "blue")])
        .collect();
    out.write_text("contour.svg", &svg(&lines, true, 600.0, 600.0))?;
    println!("eps = {}  V = {}  V0 = {}", num(sol.eps), num(sol.v), num(sol.v0));
    println!("residual = {:e}  newton iterations = {}  max|a_n| = {:e}", sol.residual_norm, sol.newton_iters, sol.max_coeff());
    let mut checks = Checks::default();
    checks.add(
        "residual_below_tolerance",
        sol.residual_norm < cfg.solve.newton_tol,
        format!("max |mode| = {:e}", sol.residual_norm),
    );
    checks.add("contour_is_simple", top.is_simple(), format!("{} nodes", top.len()));
    if let Some(path) = &cfg.solve.golden {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("key `solve.golden` ({path}): {e}")))?;
        let golden = StreetSolution::from_record(&text)?;
        let same_problem = golden.kernel == sol.kernel && golden.geom == sol.geom && golden.coeffs.len() == sol.coeffs.len();
        let diff = if same_problem {
            sol.coeffs.iter().zip(&golden.coeffs).fold((sol.v - golden.v).abs(), |m, (a, b)| m.max((a - b).abs()))
        } else {
            f64::INFINITY
        };
        checks.add("golden_record_match", diff <= cfg.solve.golden_tol, format!("max difference {diff:e}"));
    }
    Ok(checks)
}

pub fn sweep_epsilon(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let (fnl, run) = continuation(cfg)?;
    out.write_text("sweep.csv", &run.summary_csv())?;
    let steps: Vec<Vec<String>> = run.steps.iter().map(|(e, h, ok)| vec![num(*e), num(*h), ok.to_string()]).collect();
    out.write_csv("steps.csv", &["eps", "step", "accepted"], &steps)?;
    let curve: Vec<(f64, f64)> = run.solutions.iter().map(|s| (s.eps, s.v)).collect();
    let e_max = curve.last().map_or(1.0, |p| p.0);
    let lines = [
        Polyline { points: curve.clone(), closed: false, color: "black" },
        Polyline { points: vec![(0.0, fnl.v0()), (e_max, fnl.v0())], closed: false, color: "gray" },
    ];
    out.write_text("speed.svg", &svg(&lines, false, 600.0, 400.0))?;
    if let Some(e) = stalled(&run) {
        return Err(e);
    }
    let mut checks = Checks::default();
    checks.add("reached_target", true, format!("{} solutions", run.solutions.len()));
    let worst = run.solutions.iter().fold(0.0f64, |m, s| m.max(s.residual_norm));
    checks.add("residual_below_tolerance", worst < cfg.solve.newton_tol, format!("worst residual {worst:e}"));
    match verify_limit(&run) {
        Ok(report) => {
            let rows: Vec<Vec<String>> = report.entries.iter().map(|(e, d, a)| vec![num(*e), num(*d), num(*a)]).collect();
            out.write_csv("limit.csv", &["eps", "abs_V_minus_V0", "max_abs_coeff"], &rows)?;
            println!("empirical order of |V - V0| in eps: {:.3}", report.order);
            checks.add("limit_order_at_least_one", report.order >= 1.0, format!("order {:.3}", report.order));
            checks.add("coefficients_shrink", report.coeffs_shrink, "max |a_n| nondecreasing in eps".into());
            checks.add("speeds_finite", report.speeds_finite, "V finite along the branch".into());
        }
        Err(Error::Precondition(m)) => println!("limit fit skipped: {m}"),
        Err(e) => return Err(e.into()),
    }
    Ok(checks)
}

pub fn evolve_patch(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let (_, sol) = solved(cfg)?;
    let e = &cfg.evolve;
    let state = ContourState::from_solution(&sol, e.grid)?;
    let dynamics = ContourDynamics::new(sol.kernel, sol.geom, sol.eps, e.grid)?;
    let flux = dynamics.normal_flux(&state, sol.v)?.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let window = e.window_fraction * sol.geom.l / sol.v.abs();
    let steps = if e.steps > 0 {
        e.steps
    } else {
        let (vt, vb) = dynamics.boundary_velocity(&state)?;
        let vmax = vt.iter().chain(&vb).fold(0.0f64, |m, v| m.max(v.norm()));
        let spacing = state.top_boundary()?.spacing().0;
        (window / (0.2 * spacing / vmax)).ceil() as usize
    };
    let dt = window / steps as f64;
    let run = dynamics.evolve(&state, dt, steps, sol.v, e.record_every)?;
    let diag: Vec<Vec<String>> = run
        .diagnostics
        .iter()
        .enumerate()
        .map(|(k, d)| {
            vec![k.to_string(), num(d.t), num(d.area), num(d.centroid.re), num(d.centroid.im), num(d.shape_dev), num(d.symmetry_drift)]
        })
        .collect();
    out.write_csv("diagnostics.csv", &["step", "t", "area", "centroid_x", "centroid_y", "shape_deviation", "symmetry_drift"], &diag)?;
    let mut traj = Vec::new();
    for (k, s) in run.states.iter().enumerate() {
        for (label, nodes) in [("top", &s.top), ("bottom", &s.bottom)] {
            for (j, z) in nodes.iter().enumerate() {
                traj.push(vec![k.to_string(), num(s.t), label.to_string(), j.to_string(), num(z.re), num(z.im)]);
            }
        }
    }
    out.write_csv("trajectory.csv", &["snapshot", "t", "patch", "j", "x", "y"], &traj)?;
    let last = run.states.last().expect("runs hold the initial state");
    let lines = [
        polyline(&state.top, 0.0, "gray"),
        polyline(&state.bottom, 0.0, "gray"),
        polyline(&last.top, 0.0, "red"),
        polyline(&last.bottom, 0.0, "blue"),
    ];
    out.write_text("contours.svg", &svg(&lines, true, 600.0, 600.0))?;
    if let Some(err) = run.abort {
        return Err(err.into());
    }
    let c = run.centroid_velocity();
    let centroid_err = (c - sol.v).norm() / sol.v.abs();
    let diameter = state.top_boundary()?.diameter();
    let shape = run.max_shape_deviation() / diameter;
    println!("window = {}  steps = {steps}  dt = {}", num(window), num(dt));
    println!("centroid velocity = {} + {}i  V = {}", num(c.re), num(c.im), num(sol.v));
    let mut checks = Checks::default();
    checks.add("boundary_flux_at_start", flux < e.flux_tol, format!("max |Re conj(v - V) n| = {flux:e}"));
    checks.add("centroid_velocity", centroid_err < e.centroid_tol, format!("relative error {centroid_err:e}"));
    checks.add("area_conserved", run.area_drift() < e.area_tol, format!("relative drift {:e}", run.area_drift()));
    checks.add("shape_preserved", shape < e.shape_tol, format!("deviation / diameter {shape:e}"));
    checks.add("reflection_symmetry", run.max_symmetry_drift() < 1e-8 * diameter.max(1.0), format!("drift {:e}", run.max_symmetry_drift()));
    Ok(checks)
}

pub fn simulate_points(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let kernel = cfg.kernel()?;
    let p = &cfg.points;
    let every = p.record_every;
    let mut rows = Vec::new();
    let mut checks = Checks::default();
    let mut record = |step: usize, t: f64, z: &[Complex64]| {
        if step % every == 0 || step == p.steps {
            for (i, w) in z.iter().enumerate() {
                rows.push(vec![step.to_string(), num(t), i.to_string(), num(w.re), num(w.im)]);
            }
        }
    };
    match p.mode {
        PointsMode::Pair => {
            let total = p.gamma1 + p.gamma2;
            let (z1, z2) = if total.abs() > 1e-14 * (p.gamma1.abs() + p.gamma2.abs()) {
                (Complex64::new(p.gamma2 * p.d / total, 0.0), Complex64::new(-p.gamma1 * p.d / total, 0.0))
            } else {
                (Complex64::new(0.5 * p.d, 0.0), Complex64::new(-0.5 * p.d, 0.0))
            };
            let motion = two_vortex_motion(p.gamma1, p.gamma2, z1, z2, &kernel)?;
            let mut dist_err = 0.0f64;
            let mut angle = 0.0f64;
            let mut prev = z1 - z2;
            let end = integrate_points(&kernel, &[z1, z2], &[p.gamma1, p.gamma2], p.dt, p.steps, 1e-10 * p.d, |s, t, z| {
                let sep = z[0] - z[1];
                dist_err = dist_err.max((sep.norm() - p.d).abs());
                angle += (sep / prev).arg();
                prev = sep;
                record(s, t, z);
            })?;
            let t_end = p.dt * p.steps as f64;
            checks.add("pair_distance_conserved", dist_err < p.distance_tol, format!("max ||z1 - z2| - d| = {dist_err:e}"));
            match motion {
                TwoVortexMotion::Rotation { omega } => {
                    let measured = angle / t_end;
                    let rel = (measured - omega).abs() / omega.abs();
                    println!("rotation: omega = {}  measured = {}", num(omega), num(measured));
                    checks.add("rotation_frequency", rel < p.frequency_tol, format!("relative error {rel:e}"));
                }
                TwoVortexMotion::Translation { u } => {
                    let drift = (end[0] - z1) / t_end;
                    let err = (drift - u).norm();
                    println!("translation: U = {} + {}i  measured = {} + {}i", num(u.re), num(u.im), num(drift.re), num(drift.im));
                    checks.add("translation_velocity", err < p.translation_tol, format!("|drift - U| = {err:e}"));
                }
            }
        }
        PointsMode::Street | PointsMode::Row => {
            let geom = cfg.geometry()?;
            let run = if p.mode == PointsMode::Street {
                simulate_street(&kernel, &geom, p.truncation, p.dt, p.steps)?
            } else {
                simulate_row(&kernel, geom.l, p.truncation, p.dt, p.steps)?
            };
            for (s, st) in run.states.iter().enumerate() {
                let z: Vec<Complex64> = st.z_top.iter().chain(&st.z_bot).copied().collect();
                record(s, st.t, &z);
            }
            println!("central drift = {} + {}i", num(run.center_drift.re), num(run.center_drift.im));
            println!("mean drift of the central tenth = {} + {}i", num(run.drift.re), num(run.drift.im));
            println!("truncated lattice speed = {} + {}i", num(run.truncated_speed.re), num(run.truncated_speed.im));
            if p.mode == PointsMode::Row {
                let moved = run.center_drift.norm() * p.dt * p.steps as f64;
                checks.add("row_center_stationary", moved < 1e-8, format!("central displacement {moved:e}"));
            }
        }
    }
    out.write_csv("trajectory.csv", &["step", "t", "index", "x", "y"], &rows)?;
    Ok(checks)
}

pub fn lin_check(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let kernel = cfg.kernel()?;
    let c = &cfg.lincheck;
    let fnl = Functional::new(kernel, cfg.geometry()?, c.modes, c.grid)?;
    let zeros = vec![0.0; c.modes];
    let r = fnl.residual_modes(0.0, &zeros)?.modes;
    let jac = fd_jacobian(&fnl, 0.0, &zeros, &r, c.fd_step)?;
    let log_type = kernel.kind().is_log_type();
    let mut rows = Vec::new();
    let (mut diag_err, mut off_max, mut diag_max) = (0.0f64, 0.0f64, 0.0f64);
    println!("{:>3} {:>25} {:>25} {:>12}", "n", "fd_diagonal", "predicted", "error");
    for n in 1..=c.modes {
        let d = jac[(n - 1, n - 1)];
        let pred = fnl.predicted_diagonal(n);
        let err = if log_type { (d - pred).abs() } else { (d - pred).abs() / pred.abs() };
        let off = (0..c.modes).filter(|&i| i != n - 1).fold(0.0f64, |m, i| m.max(jac[(i, n - 1)].abs()));
        diag_err = diag_err.max(err);
        off_max = off_max.max(off);
        diag_max = diag_max.max(d.abs());
        println!("{n:>3} {:>25} {:>25} {err:>12.3e}", num(d), num(pred));
        let reference = if log_type { num(linearized_modes_euler(n)) } else { String::new() };
        rows.push(vec![n.to_string(), num(d), num(pred), reference, num(err), num(off)]);
    }
    out.write_csv("jacobian.csv", &["n", "fd_diagonal", "predicted", "euler_reference", "error", "max_off_diagonal"], &rows)?;
    let mut checks = Checks::default();
    let kind = if log_type { "absolute" } else { "relative" };
    checks.add("diagonal_matches_prediction", diag_err <= c.tol, format!("max {kind} error {diag_err:e}"));
    checks.add("off_diagonal_vanishes", off_max <= c.tol * diag_max.max(1.0), format!("max off-diagonal {off_max:e}"));
    if !log_type {
        let mut lam = Vec::new();
        let mut all_nonzero = true;
        for n in 1..=c.lambda_modes {
            let h = h6_coefficient(&kernel, n, c.lambda_grid)?;
            all_nonzero &= h.nonzero;
            println!("Lambda_{n} = {} + {}i", num(h.value.re), num(h.value.im));
            lam.push(vec![n.to_string(), num(h.value.re), num(h.value.im), num(h.value.norm()), h.nonzero.to_string()]);
        }
        out.write_csv("lambda.csv", &["n", "re", "im", "abs", "nonzero"], &lam)?;
        checks.add("lambda_nonzero", all_nonzero, format!("n = 1..{}", c.lambda_modes));
    }
    Ok(checks)
}

/// `K_nu(x) = e^-x int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt`, truncated where
/// the integrand falls below `e^-745`.
pub fn bessel_integral(nu: f64, x: f64) -> f64 {
    let t_max = (1.0 + 745.0 / x).acosh();
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    // the integral is O(1); a coarse pass sets a tolerance just above rounding
    let rough = adaptive_integrate(&f, 0.0, t_max, 1e-8);
    (-x).exp() * adaptive_integrate(&f, 0.0, t_max, 1e-15 * rough)
}

pub fn bessel_check(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let b = &cfg.bessel;
    let mut rows = Vec::new();
    let (mut e0, mut e1) = (0.0f64, 0.0f64);
    println!("{:>8} {:>25} {:>12} {:>25} {:>12}", "x", "K0", "rel_err", "K1", "rel_err");
    for &x in &b.points {
        let (k0, k1) = (bessel_k0(x)?, bessel_k1(x)?);
        let (r0, r1) = (bessel_integral(0.0, x), bessel_integral(1.0, x));
        let (d0, d1) = (((k0.value - r0) / r0).abs(), ((k1.value - r1) / r1).abs());
        e0 = e0.max(d0);
        e1 = e1.max(d1);
        println!("{:>8} {:>25} {d0:>12.3e} {:>25} {d1:>12.3e}", x, num(k0.value), num(k1.value));
        rows.push(vec![num(x), num(k0.value), num(r0), num(d0), num(k1.value), num(r1), num(d1)]);
    }
    out.write_csv("bessel.csv", &["x", "K0", "K0_integral", "K0_rel_err", "K1", "K1_integral", "K1_rel_err"], &rows)?;
    let x = b.asymptotic_point;
    let k0 = bessel_k0(x)?.value;
    let lead = (PI / (2.0 * x)).sqrt() * (-x).exp();
    let da = ((k0 - lead) / lead).abs();
    println!("K0({x}) = {}  leading asymptotic term {}  relative gap {da:e}", num(k0), num(lead));
    let mut checks = Checks::default();
    checks.add("k0_matches_integral", e0 <= b.tol, format!("max relative error {e0:e}"));
    checks.add("k1_matches_integral", e1 <= b.tol, format!("max relative error {e1:e}"));
    checks.add("k0_asymptotic", da <= b.asymptotic_tol, format!("relative gap {da:e} at x = {x}"));
    Ok(checks)
}

pub fn sample_field(cfg: &RunConfig, out: &OutDir) -> Result<Checks, CliError> {
    let kernel = cfg.kernel()?;
    let geom = cfg.geometry()?;
    let f = &cfg.field;
    let (b1, b2) = match f.source {
        FieldSource::Circle => {
            let b1 = SampledBoundary::circle(Complex64::new(0.0, 0.0), f.eps, f.grid)?;
            let b2 = b1.partner(geom.a, geom.h);
            (b1, b2)
        }
        FieldSource::Solution => contour(&solved(cfg)?.1, f.grid)?,
    };
    // unit circulation per patch
    let scale = PI / b1.area();
    let field = StreetField::new(kernel, geom.l, b1.clone(), b2.clone());
    let samples = field.sample_grid((f.x_min, f.x_max), (f.y_min, f.y_max), f.nx, f.ny);
    let h = f.divergence_step;
    let divergence = |x: f64, y: f64| -> Option<f64> {
        let v = |dx: f64, dy: f64| field.velocity(Complex64::new(x + dx, y + dy)).ok();
        let (e, w, n, s) = (v(h, 0.0)?, v(-h, 0.0)?, v(0.0, h)?, v(0.0, -h)?);
        Some(scale * ((e.re - w.re) + (n.im - s.im)) / (2.0 * h))
    };
    // central differences must not straddle a boundary, where the gradient jumps
    let clearance = 10.0 * h + b1.spacing().1.max(b2.spacing().1);
    let clear = |z: Complex64| b1.node_distance(z) > clearance && b2.node_distance(z) > clearance;
    let mut rows = Vec::new();
    let mut div_max = 0.0f64;
    let mut skipped = 0usize;
    for (x, y, v) in &samples {
        let Some(v) = v else {
            skipped += 1;
            continue;
        };
        let u = scale * v;
        rows.push(vec![num(*x), num(*y), num(u.re), num(u.im)]);
        if clear(Complex64::new(*x, *y)) {
            if let Some(d) = divergence(*x, *y) {
                div_max = div_max.max(d.abs());
            }
        }
    }
    out.write_csv("field.csv", &["x", "y", "u", "v"], &rows)?;
    println!("{} samples, {skipped} on a boundary", samples.len());
    let mut checks = Checks::default();
    checks.add("divergence_free", div_max < f.divergence_tol, format!("max |div v| = {div_max:e} off the boundaries"));
    Ok(checks)
}
