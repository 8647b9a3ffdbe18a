use hdgbem::bem::{assemble_layer_operators, LayerOperatorSet, Mode, TrigPolynomial};
use hdgbem::coupling::{monolithic_solve, Coupler, CouplingConfig, CouplingError, ProblemData};
use hdgbem::geometry::{build_annulus_mesh, build_boundary_map, Curve, MapStrategy, MappedPoint};
use hdgbem::hdg::{HdgSystem, MaterialField, SystemOptions};
use hdgbem::Vec2;

fn setup(h: f64, k: usize, n: usize) -> (HdgSystem, LayerOperatorSet) {
    let g = Curve::circle(Vec2::ZERO, 1.0).unwrap();
    let g0 = Curve::circle(Vec2::ZERO, 0.5).unwrap();
    let m = build_annulus_mesh(&g, &g0, h, 12.0).unwrap();
    let b = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
    let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), k, &SystemOptions::default()).unwrap();
    let ops = assemble_layer_operators(&g, n).unwrap();
    (sys, ops)
}

fn dipole(x: Vec2) -> f64 {
    x.x / x.norm_sq()
}

fn dipole_plus_three(p: &MappedPoint) -> f64 {
    dipole(p.xbar) + 3.0
}

fn dipole_u0(p: &MappedPoint) -> f64 {
    dipole(p.xbar)
}

#[test]
fn zero_data_converges_in_one_iteration() {
    let (sys, ops) = setup(0.2, 1, 8);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &|_| 0.0 };
    let cfg = CouplingConfig { n: 8, ..CouplingConfig::default() };
    let st = c.run_fixed_point(&data, &cfg).unwrap();
    assert_eq!(st.iterations, 1);
    assert_eq!(st.g.max_abs_coeff(), 0.0);
    assert_eq!(st.constant, 0.0);
}

#[test]
fn dipole_converges_to_exact_trace() {
    let (sys, ops) = setup(0.1, 1, 16);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_u0 };
    let cfg = CouplingConfig { n: 16, tolerance: 1e-10, ..CouplingConfig::default() };
    let st = c.run_fixed_point(&data, &cfg).unwrap();
    let exact = TrigPolynomial::from_modes(16, |m| if m == Mode::Cos(1) { 1.0 } else { 0.0 });
    let err = ops.l2_norm(&st.trace().sub(&exact));
    assert!(err < 5e-3, "{err:e}");
    assert!(st.u_inf.abs() < 5e-3);
    let lam_exact = exact.scale(-1.0);
    assert!(ops.l2_norm(&st.lambda.sub(&lam_exact)) < 5e-2);
    for r in &st.lambda_mean {
        assert!(*r <= 1e-12);
    }
}

#[test]
fn constant_at_infinity_is_recovered() {
    let (sys, ops) = setup(0.1, 2, 16);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_plus_three };
    let cfg = CouplingConfig { n: 16, tolerance: 1e-11, ..CouplingConfig::default() };
    let st = c.run_fixed_point(&data, &cfg).unwrap();
    assert!((st.u_inf - 3.0).abs() < 1e-3, "{}", st.u_inf);
}

#[test]
fn monolithic_matches_fixed_point() {
    let (sys, ops) = setup(0.15, 1, 12);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_plus_three };
    let cfg = CouplingConfig { n: 12, tolerance: 1e-13, max_iterations: 400, ..CouplingConfig::default() };
    let st = c.run_fixed_point(&data, &cfg).unwrap();
    let mono = monolithic_solve(&c, &data).unwrap();
    let d = ops.l2_norm(&st.trace().sub(&mono.trace())) / ops.l2_norm(&mono.trace());
    assert!(d < 1e-9, "{d:e}");
    assert!((st.u_inf - mono.u_inf).abs() < 1e-9);
}

#[test]
fn omega_does_not_change_the_limit() {
    let (sys, ops) = setup(0.15, 1, 12);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_plus_three };
    let mut traces = Vec::new();
    for omega in [0.3, 0.5, 0.6] {
        let cfg = CouplingConfig { n: 12, omega, tolerance: 1e-12, max_iterations: 500, ..CouplingConfig::default() };
        traces.push(c.run_fixed_point(&data, &cfg).unwrap().trace());
    }
    for t in &traces[1..] {
        assert!(ops.l2_norm(&t.sub(&traces[0])) < 1e-9);
    }
}

#[test]
fn unrelaxed_iteration_fails_with_history() {
    let (sys, ops) = setup(0.2, 1, 8);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_u0 };
    let cfg = CouplingConfig { n: 8, omega: 1.0, max_iterations: 15, ..CouplingConfig::default() };
    match c.run_fixed_point(&data, &cfg) {
        Err(CouplingError::NotConverged { history }) => {
            assert_eq!(history.len(), 15);
            assert!(history[14] > history[2]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn aitken_reaches_the_same_limit() {
    let (sys, ops) = setup(0.15, 1, 12);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_plus_three };
    let base = CouplingConfig { n: 12, tolerance: 1e-12, max_iterations: 500, ..CouplingConfig::default() };
    let a = c.run_fixed_point(&data, &base).unwrap();
    let b = c.run_fixed_point(&data, &CouplingConfig { aitken: true, ..base.clone() }).unwrap();
    assert!(b.iterations <= a.iterations);
    assert!(ops.l2_norm(&a.trace().sub(&b.trace())) < 1e-9);
}

#[test]
fn mismatched_degree_is_rejected() {
    let (sys, ops) = setup(0.2, 1, 8);
    let c = Coupler::new(&sys, &ops).unwrap();
    let data = ProblemData { f: &|_| 0.0, u0: &dipole_u0 };
    let cfg = CouplingConfig { n: 9, ..CouplingConfig::default() };
    assert!(matches!(c.run_fixed_point(&data, &cfg), Err(CouplingError::Dimension(9, 8))));
}
