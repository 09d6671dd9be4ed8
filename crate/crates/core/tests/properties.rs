//! Property-based invariants across the public API.

use karman_core::boundary::{BoundaryMap, SampledBoundary};
use karman_core::contour_functional::Functional;
use karman_core::lattice::LatticeKernel;
use karman_core::periodic_field::{decomposed_velocity, euler_velocity_logsin};
use karman_core::point_street::{integrate_points, street_speed_closed_form, street_speed_sum, two_vortex_motion, TwoVortexMotion};
use karman_core::{Complex64, RadialKernel, StreetGeometry};
use proptest::prelude::*;

fn kernel_strategy() -> impl Strategy<Value = RadialKernel> {
    prop_oneof![
        Just(RadialKernel::euler()),
        (0.3f64..3.0).prop_map(|l| RadialKernel::qgsw(l).unwrap()),
        (0.1f64..0.9).prop_map(|b| RadialKernel::gsqg(b).unwrap()),
    ]
}

/// Coefficients with `sum n |a_n| <= budget`.
fn coeffs_strategy(n: usize, budget: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n).prop_map(move |raw| {
        let norm: f64 = raw.iter().enumerate().map(|(k, a)| (k + 1) as f64 * a.abs()).sum();
        let scale = if norm > 0.0 { budget / norm } else { 0.0 };
        raw.iter().map(|a| a * scale).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn kernel_derivative_matches_difference_quotient(k in kernel_strategy(), r in 0.01f64..5.0) {
        let h = 1e-6 * r;
        let fd = (k.g(r + h) - k.g(r - h)) / (2.0 * h);
        prop_assert!((fd - k.gp(r)).abs() <= 1e-6 * k.gp(r).abs().max(1e-8));
    }

    #[test]
    fn lattice_kernel_is_periodic_and_even(k in kernel_strategy(), x in -0.5f64..0.5, y in 0.05f64..1.5) {
        let lat = LatticeKernel::new(k, 1.0);
        let z = Complex64::new(x, y);
        let base = lat.full(z);
        prop_assert!((lat.full(z + 1.0) - base).abs() <= 1e-11 * base.abs().max(1.0));
        prop_assert!((lat.full(-z) - base).abs() <= 1e-11 * base.abs().max(1.0));
    }

    #[test]
    fn map_respects_conjugation_symmetry(k in kernel_strategy(), eps in 0.0f64..0.2, c in coeffs_strategy(6, 0.9), t in 0.0f64..6.3) {
        let map = BoundaryMap::new(&k, eps, c).unwrap();
        let w = Complex64::from_polar(1.0, t);
        let lhs = map.phi(w.conj());
        let rhs = -map.phi(w).conj();
        prop_assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn limit_speed_ignores_the_map(k in kernel_strategy(), c in coeffs_strategy(6, 0.5), stagger in prop::bool::ANY) {
        let g = StreetGeometry::new(1.0, 1.0, if stagger { 0.5 } else { 0.0 }).unwrap();
        let f = Functional::new(k, g, 6, 32).unwrap();
        let v = f.v_of(&f.map(0.0, c).unwrap()).unwrap();
        prop_assert!((v - f.v0()).abs() < 1e-10, "{} vs {}", v, f.v0());
    }

    #[test]
    fn limit_residual_is_linear(k in kernel_strategy(), a in coeffs_strategy(4, 0.3), b in coeffs_strategy(4, 0.3)) {
        let g = StreetGeometry::new(1.0, 1.0, 0.0).unwrap();
        let f = Functional::new(k, g, 4, 32).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let ra = f.residual_modes(0.0, &a).unwrap().modes;
        let rb = f.residual_modes(0.0, &b).unwrap().modes;
        let rs = f.residual_modes(0.0, &sum).unwrap().modes;
        for i in 0..4 {
            prop_assert!((rs[i] - ra[i] - rb[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_is_odd_with_real_speed(k in kernel_strategy(), eps in 0.001f64..0.1, c in coeffs_strategy(4, 0.5)) {
        let g = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
        let f = Functional::new(k, g, 4, 32).unwrap();
        let r = f.residual(&f.map(eps, c).unwrap()).unwrap();
        prop_assert!(r.symmetry_defect < 1e-11);
        prop_assert!(r.first_mode.abs() < 1e-11);
        prop_assert!(r.v_imag.abs() < 1e-11);
    }

    #[test]
    fn euler_street_sum_matches_closed_form(h in 0.2f64..2.0, stagger in prop::bool::ANY) {
        let g = StreetGeometry::new(1.0, h, if stagger { 0.5 } else { 0.0 }).unwrap();
        let sum = street_speed_sum(&RadialKernel::euler(), &g, 1e-10).unwrap().v;
        prop_assert!((sum - street_speed_closed_form(&g)).norm() < 1e-8);
    }

    #[test]
    fn pair_distance_is_conserved(k in kernel_strategy(), g1 in 0.2f64..2.0, g2 in 0.2f64..2.0) {
        let d = 1.0;
        let z1 = Complex64::new(g2 * d / (g1 + g2), 0.0);
        let z2 = Complex64::new(-g1 * d / (g1 + g2), 0.0);
        let motion = two_vortex_motion(g1, g2, z1, z2, &k).unwrap();
        let rotates = matches!(motion, TwoVortexMotion::Rotation { .. });
        prop_assert!(rotates);
        let end = integrate_points(&k, &[z1, z2], &[g1, g2], 1e-3, 200, 1e-6, |_, _, _| {}).unwrap();
        prop_assert!(((end[0] - end[1]).norm() - d).abs() < 1e-9);
    }

    #[test]
    fn euler_field_forms_agree_off_the_patches(x in -0.5f64..0.5, y in 0.15f64..0.8, rx in 0.05f64..0.12, ry in 0.05f64..0.12) {
        let g = StreetGeometry::new(1.0, 1.0, 0.5).unwrap();
        let b1 = SampledBoundary::ellipse(Complex64::new(0.0, 0.0), rx, ry, 96).unwrap();
        let b2 = b1.partner(g.a, g.h);
        let p = Complex64::new(x, y);
        let u = euler_velocity_logsin(p, &b1, &b2, 1.0).unwrap();
        let v = decomposed_velocity(p, &b1, &b2, 1.0).unwrap();
        prop_assert!((u - v).norm() < 1e-12);
    }
}
