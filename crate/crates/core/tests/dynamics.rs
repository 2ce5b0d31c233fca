use eps_core::algebra::{HamiltonianSpec, PhasePolynomial};
use eps_core::dynamics::frames::{analytic_w, moving_frame_a, moving_frame_phi, AnalyticConstants};
use eps_core::dynamics::*;
use eps_core::gauge::{gauge_momentum_shift, HarmonicDrive, PhysicalParams};
use eps_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(alpha: f64) -> PhysicalParams {
    PhysicalParams { m: 1.3, e: 0.9, c: 1.0, alpha, hbar: 1.0, n: 1 }
}

#[test]
fn free_streaming_is_exact() {
    let pr = params(0.0);
    let field = TransportField::a_gauge(pr, HarmonicDrive::real(0.0, 1.0, 0.0));
    let w0 = InitialCondition::gaussian(0.2, 0.7, 0.8, 0.6);
    let t = 3.7;
    let query: Vec<(f64, f64)> = (0..50).map(|k| (-4.0 + 0.3 * k as f64, -1.0 + 0.07 * k as f64)).collect();
    let out = evolve_characteristics(&w0, &field, t, &query, None).unwrap();
    for (&(q, p), w) in query.iter().zip(&out.values) {
        let exact = w0.evaluate_real(q - p * t / pr.m, p);
        assert!((w.re - exact).abs() <= 1e-12 * exact.abs().max(1e-300) + 1e-300, "({q},{p})");
        assert_eq!(w.im, 0.0);
    }
}

#[test]
fn damped_displacement_saturates() {
    let pr = params(0.5);
    let field = TransportField::phi_gauge(pr, HarmonicDrive::real(0.0, 1.0, 0.0));
    for t in [0.5, 2.0, 40.0] {
        let flow = kanai_flow(&field, t, FlowMethod::ClosedForm).unwrap();
        let exact = (1.0 - (-pr.alpha * t).exp()) / (pr.m * pr.alpha);
        assert!((flow.drift_per_momentum.re - exact).abs() < 1e-14);
        let quad = kanai_flow(&field, t, FlowMethod::Quadrature).unwrap();
        assert!((quad.drift_per_momentum - flow.drift_per_momentum).norm() < 1e-14);
    }
    let far = kanai_flow(&field, 200.0, FlowMethod::ClosedForm).unwrap();
    assert!((far.drift_per_momentum.re - 1.0 / (pr.m * pr.alpha)).abs() < 1e-14);
}

#[test]
fn closed_form_flow_matches_quadrature_for_real_drives() {
    let pr = params(0.5);
    for omega in [0.0, 0.7, 2.0] {
        let drive = HarmonicDrive::real(0.4, omega, 0.3);
        for field in [TransportField::a_gauge(pr, drive), TransportField::phi_gauge(pr, drive)] {
            for t in [0.3, 2.5, 9.0] {
                let a = kanai_flow(&field, t, FlowMethod::ClosedForm).unwrap();
                let b = kanai_flow(&field, t, FlowMethod::Quadrature).unwrap();
                let scale = 1.0 + a.momentum_shift.norm() + a.drift.norm();
                assert!((a.momentum_shift - b.momentum_shift).norm() < 1e-8 * scale, "{:?}", field.gauge());
                assert!((a.drift - b.drift).norm() < 1e-8 * scale, "{:?} ω={omega} t={t}", field.gauge());
                assert_eq!(a.momentum_shift.im, 0.0);
                assert_eq!(a.drift.im, 0.0);
            }
        }
    }
}

#[test]
fn flow_forward_and_backward_are_inverse() {
    let pr = params(0.5);
    let field = TransportField::phi_gauge(pr, HarmonicDrive::phasor(0.4, 1.3, 0.2));
    let flow = kanai_flow(&field, 2.2, FlowMethod::Auto).unwrap();
    let (q, p) = flow.forward(c(0.3, 0.0), c(-1.0, 0.0));
    let (q0, p0) = flow.backward(q, p);
    assert!((q0 - c(0.3, 0.0)).norm() < 1e-14 && (p0 - c(-1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn gauges_agree_up_to_the_momentum_shift() {
    let pr = params(0.5);
    let drive = HarmonicDrive::real(0.5, 1.1, 0.4);
    let base = InitialCondition::gaussian(0.0, 0.3, 1.0, 0.8);
    let shift0 = gauge_momentum_shift(&drive, &pr, 0.0).unwrap().re;
    let w_phi0 = base.clone().translated(0.0, shift0);
    let a = TransportField::a_gauge(pr, drive);
    let phi = TransportField::phi_gauge(pr, drive);
    for t in [0.7, 3.1, 6.0] {
        let shift = gauge_momentum_shift(&drive, &pr, t).unwrap().re;
        let q_points: Vec<(f64, f64)> = (0..20).map(|k| (-3.0 + 0.3 * k as f64, -1.5 + 0.17 * k as f64)).collect();
        let shifted: Vec<(f64, f64)> = q_points.iter().map(|&(q, p)| (q, p + shift)).collect();
        let wa = evolve_characteristics(&base, &a, t, &q_points, None).unwrap();
        let wp = evolve_characteristics(&w_phi0, &phi, t, &shifted, None).unwrap();
        for (x, y) in wa.values.iter().zip(&wp.values) {
            assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()), "t={t}: {x} vs {y}");
        }
    }
}

#[test]
fn analytic_profile_is_transported_exactly_without_drive() {
    let pr = params(0.5);
    let constants = AnalyticConstants { sp: 0.3, ..AnalyticConstants::default() };
    let w0 = InitialCondition::MollifiedDeltaLine { constants, params: pr };
    let field = TransportField::a_gauge(pr, HarmonicDrive::real(0.0, 1.0, 0.0));
    let t = 1.8;
    let query: Vec<(f64, f64)> = (0..15).map(|k| (-1.0 + 0.13 * k as f64, 0.4 + 0.08 * k as f64)).collect();
    let out = evolve_characteristics(&w0, &field, t, &query, None).unwrap();
    for (&(q, p), w) in query.iter().zip(&out.values) {
        let exact = analytic_w(c(q, 0.0), c(p, 0.0), t, &constants, &pr).unwrap();
        assert!((w - exact).norm() < 1e-12 * exact.norm(), "({q},{p}): {w} vs {exact}");
    }
}

/// Residual of `∂_t W + v_q ∂_q W + v_p ∂_p W` for the analytic profile seen
/// through a moving frame, with complex (phasor) velocities.
fn frame_residual(phi: bool) -> f64 {
    let pr = params(0.5);
    let drive = HarmonicDrive::phasor(0.3, 1.4, 0.2);
    let constants = AnalyticConstants { sp: 0.4, ..AnalyticConstants::default() };
    let field = if phi { TransportField::phi_gauge(pr, drive) } else { TransportField::a_gauge(pr, drive) };
    let w = |q: f64, p: f64, t: f64| {
        let (xi, eta, tau) =
            if phi { moving_frame_phi(q, p, t, &pr, &drive) } else { moving_frame_a(q, p, t, &pr, &drive) }.unwrap();
        analytic_w(xi, eta, tau, &constants, &pr).unwrap()
    };
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (q, p, t) in [(0.1, 1.0, 0.5), (-0.4, 1.3, 1.2), (0.5, 0.9, 2.0)] {
        let dt = (w(q, p, t + h) - w(q, p, t - h)) / (2.0 * h);
        let dq = (w(q + h, p, t) - w(q - h, p, t)) / (2.0 * h);
        let dp = (w(q, p + h, t) - w(q, p - h, t)) / (2.0 * h);
        let (vq, vp) = field.velocity(c(q, 0.0), c(p, 0.0), t).unwrap();
        let r = dt + vq * dq + vp * dp;
        let scale = dt.norm() + (vq * dq).norm() + (vp * dp).norm();
        worst = worst.max(r.norm() / scale);
    }
    worst
}

#[test]
fn a_gauge_frame_solves_transport() {
    assert!(frame_residual(false) < 1e-7);
}

#[test]
fn phi_gauge_frame_solves_transport() {
    assert!(frame_residual(true) < 1e-7);
}

#[test]
fn custom_harmonic_oscillator_rotates() {
    let pr = params(0.0);
    let h = PhasePolynomial::new().with_term(2, 0, c(0.5, 0.0)).with_term(0, 2, c(0.5, 0.0));
    let field = TransportField::new(HamiltonianSpec::constant(pr, h));
    let w0 = InitialCondition::gaussian(1.0, 0.0, 0.3, 0.5);
    let t = 1.0;
    let query = [(0.5, -0.8), (0.0, 0.0), (1.2, 0.3)];
    let out = evolve_characteristics(&w0, &field, t, &query, None).unwrap();
    for (&(q, p), w) in query.iter().zip(&out.values) {
        // Backward rotation by angle t.
        let (s, co) = t.sin_cos();
        let exact = w0.evaluate_real(q * co - p * s, q * s + p * co);
        assert!((w.re - exact).abs() < 1e-9 * exact.max(1e-3), "{w} vs {exact}");
    }
}

#[test]
fn zero_field_leaves_grid_bit_for_bit_unchanged() {
    let pr = params(0.5);
    let field = TransportField::new(HamiltonianSpec::constant(pr, PhasePolynomial::new()));
    let g = GridGeometry::new(-4.0, 4.0, -4.0, 4.0, 32, 32).unwrap();
    let w0 = InitialCondition::gaussian(0.3, -0.2, 0.7, 0.9);
    let grid = PhaseGrid::from_fn(g, 0.0, |q, p| w0.evaluate_real(q, p)).unwrap();
    let out = evolve_semilagrangian(&grid, &field, 0.1, 25, Interpolation::Cubic).unwrap();
    assert_eq!(out.grid.values(), grid.values());
    assert!((out.grid.t() - 2.5).abs() < 1e-12);
}

fn phi_setup() -> (TransportField, InitialCondition, GridGeometry) {
    let pr = params(0.3);
    let drive = HarmonicDrive::real(0.3, 1.5, 0.0);
    let field = TransportField::phi_gauge(pr, drive);
    let w0 = InitialCondition::gaussian(0.0, 0.0, 1.2, 1.2);
    let g = covering_geometry(&w0, &field, 4.0, 8.0, 96, 96).unwrap();
    (field, w0, g)
}

#[test]
fn grid_solver_conserves_mass_and_tracks_characteristics() {
    let (field, w0, g) = phi_setup();
    let grid = PhaseGrid::from_fn(g, 0.0, |q, p| w0.evaluate_real(q, p)).unwrap();
    let steps = 200;
    let dt = 4.0 / steps as f64;
    let out = evolve_semilagrangian(&grid, &field, dt, steps, Interpolation::Cubic).unwrap();
    assert!(out.warnings.is_empty());
    assert!((out.grid.mass() - grid.mass()).abs() < 1e-10 * grid.mass());
    let exact = characteristics_on_grid(&w0, &field, out.grid.t(), g).unwrap();
    let rel = out.grid.l1_distance(&exact).unwrap() / exact.l1_norm();
    assert!(rel < 2e-2, "relative L1 error {rel}");
}

#[test]
fn grid_solver_converges_under_refinement() {
    let (field, w0, g) = phi_setup();
    let errors: Vec<f64> = [1usize, 2]
        .iter()
        .map(|&f| {
            let geom = GridGeometry::new(g.q_min, g.q_max, g.p_min, g.p_max, 48 * f, 48 * f).unwrap();
            let grid = PhaseGrid::from_fn(geom, 0.0, |q, p| w0.evaluate_real(q, p)).unwrap();
            let steps = 50 * f;
            let out = evolve_semilagrangian(&grid, &field, 2.0 / steps as f64, steps, Interpolation::Cubic).unwrap();
            let exact = characteristics_on_grid(&w0, &field, out.grid.t(), geom).unwrap();
            out.grid.l1_distance(&exact).unwrap() / exact.l1_norm()
        })
        .collect();
    assert!(errors[1] < errors[0] / 2.5, "{errors:?}");
}

#[test]
fn a_gauge_momentum_marginal_is_invariant() {
    let pr = params(0.5);
    let field = TransportField::a_gauge(pr, HarmonicDrive::real(0.4, 1.0, 0.0));
    let w0 = InitialCondition::gaussian(0.0, 0.0, 1.0, 0.7);
    let g = covering_geometry(&w0, &field, 3.0, 9.0, 64, 48).unwrap();
    let grid = PhaseGrid::from_fn(g, 0.0, |q, p| w0.evaluate_real(q, p)).unwrap();
    let out = evolve_semilagrangian(&grid, &field, 0.05, 60, Interpolation::Cubic).unwrap();
    let marginal =
        |gr: &PhaseGrid| -> Vec<f64> { (0..g.np).map(|j| (0..g.nq).map(|i| gr.get(i, j)).sum::<f64>()).collect() };
    let before = marginal(&grid);
    let after = marginal(&out.grid);
    let peak = before.iter().cloned().fold(0.0, f64::max);
    for (a, b) in before.iter().zip(&after) {
        assert!((a - b).abs() < 1e-10 * peak);
    }
}

#[test]
fn large_steps_raise_displacement_warnings() {
    let pr = params(0.0);
    let field = TransportField::a_gauge(pr, HarmonicDrive::real(0.0, 1.0, 0.0));
    let g = GridGeometry::new(-2.0, 2.0, -2.0, 2.0, 16, 16).unwrap();
    let grid = PhaseGrid::from_fn(g, 0.0, |q, p| (-(q * q + p * p)).exp()).unwrap();
    let out = evolve_semilagrangian(&grid, &field, 5.0, 2, Interpolation::Linear).unwrap();
    assert_eq!(out.warnings.len(), 2);
    assert!(out.warnings[0].fraction > DISPLACEMENT_WARNING_FRACTION);
}

#[test]
fn grid_solver_rejects_phasor_drives_and_bad_steps() {
    let pr = params(0.5);
    let field = TransportField::a_gauge(pr, HarmonicDrive::phasor(0.3, 1.0, 0.0));
    let g = GridGeometry::new(-2.0, 2.0, -2.0, 2.0, 16, 16).unwrap();
    let grid = PhaseGrid::zeros(g, 0.0).unwrap();
    assert!(evolve_semilagrangian(&grid, &field, 0.1, 1, Interpolation::Cubic).is_err());
    let field = TransportField::a_gauge(pr, HarmonicDrive::real(0.3, 1.0, 0.0));
    assert!(evolve_semilagrangian(&grid, &field, 0.0, 1, Interpolation::Cubic).is_err());
}

#[test]
fn ensemble_mass_matches_grid_mass() {
    let w0 = InitialCondition::gaussian(0.0, 0.0, 1.0, 1.0);
    let g = GridGeometry::new(-8.0, 8.0, -8.0, 8.0, 64, 64).unwrap();
    let e = Ensemble::sample(&w0, &g).unwrap();
    let grid = PhaseGrid::from_fn(g, 0.0, |q, p| w0.evaluate_real(q, p)).unwrap();
    assert!((e.mass() - grid.mass()).abs() < 1e-13);
    assert!((e.mass() - w0.mass_fraction_inside(&g).unwrap()).abs() < 1e-10);
}
