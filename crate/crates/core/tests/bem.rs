use std::f64::consts::{PI, TAU};

use hdgbem::bem::{
    assemble_layer_operators, double_layer_kernel, single_layer_kernel, BemError, ExteriorSolution, Mode,
    TrigPolynomial,
};
use hdgbem::geometry::Curve;
use hdgbem::Vec2;
use proptest::prelude::*;

fn unit() -> Curve {
    Curve::circle(Vec2::ZERO, 1.0).unwrap()
}

fn mode_poly(n: usize, want: Mode, c: f64) -> TrigPolynomial {
    TrigPolynomial::from_modes(n, |m| if m == want { c } else { 0.0 })
}

#[test]
fn kernel_values_on_unit_circle() {
    let c = unit();
    assert!((single_layer_kernel(&c, 0.0, PI) + 2f64.ln() / TAU).abs() < 1e-15);
    for &(s, t) in &[(0.1, 2.0), (3.0, 0.5), (1.0, 1.0)] {
        assert!((double_layer_kernel(&c, s, t) + 1.0 / (4.0 * PI)).abs() < 1e-14);
    }
}

#[test]
fn single_layer_eigenvalues_on_circle() {
    for c in [unit(), Curve::ellipse(Vec2::ZERO, 1.0, 1.0).unwrap()] {
        let n = 12;
        let ops = assemble_layer_operators(&c, n).unwrap();
        for m in 1..n {
            let p = mode_poly(n, Mode::Cos(m), 1.0);
            let v = ops.single_layer_at_nodes(&p);
            for (t, val) in hdgbem::bem::nodes(n).iter().zip(v) {
                assert!((val - (m as f64 * t).cos() / (2.0 * m as f64)).abs() < 1e-12, "m={m}");
            }
        }
    }
}

#[test]
fn quadrature_path_matches_circle_fast_path() {
    let n = 10;
    let fast = assemble_layer_operators(&unit(), n).unwrap();
    let slow = assemble_layer_operators(&Curve::ellipse(Vec2::ZERO, 1.0, 1.0).unwrap(), n).unwrap();
    for (a, b) in [
        (fast.single_layer_matrix(), slow.single_layer_matrix()),
        (fast.double_layer_matrix(), slow.double_layer_matrix()),
        (fast.mass_matrix(), slow.mass_matrix()),
    ] {
        for i in 0..2 * n {
            for j in 0..2 * n {
                assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-12, "({i},{j}) {} {}", a[(i, j)], b[(i, j)]);
            }
        }
    }
}

#[test]
fn single_layer_is_symmetric_on_ellipse() {
    let ops = assemble_layer_operators(&Curve::ellipse(Vec2::ZERO, 1.3, 0.8).unwrap(), 8).unwrap();
    let v = ops.single_layer_matrix();
    for i in 0..16 {
        for j in 0..16 {
            assert!((v[(i, j)] - v[(j, i)]).abs() < 1e-12);
        }
    }
}

#[test]
fn exterior_solve_on_circle() {
    let n = 8;
    let ops = assemble_layer_operators(&unit(), n).unwrap();
    assert_eq!(ops.solve_exterior(&TrigPolynomial::zero(n)).unwrap(), TrigPolynomial::zero(n));
    for m in 1..n {
        let g = ops.solve_exterior(&mode_poly(n, Mode::Cos(m), 1.0)).unwrap();
        let want = mode_poly(n, Mode::Cos(m), -1.0 / m as f64);
        for (a, b) in g.coeffs().iter().zip(want.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
    let g = ops.solve_exterior(&mode_poly(n, Mode::Sin(2), 1.0)).unwrap();
    assert!((g.eval(0.3) + (0.6f64).sin() / 2.0).abs() < 1e-13);
}

#[test]
fn non_mean_zero_density_is_rejected() {
    let ops = assemble_layer_operators(&unit(), 4).unwrap();
    let p = TrigPolynomial::zero(4).plus_constant(1.0);
    assert!(matches!(ops.solve_exterior(&p), Err(BemError::NotMeanZero { .. })));
}

#[test]
fn projection_examples() {
    let n = 6;
    let ops = assemble_layer_operators(&unit(), n).unwrap();
    let c3 = mode_poly(n, Mode::Cos(3), 1.0);
    assert_eq!(ops.project_mean_zero(&TrigPolynomial::zero(n).plus_constant(2.0)).max_abs_coeff(), 0.0);
    assert_eq!(ops.project_mean_zero(&c3).coeffs(), c3.coeffs());
    assert_eq!(ops.project_mean_zero(&c3.plus_constant(5.0)).coeffs(), c3.coeffs());
}

#[test]
fn u_infinity_examples() {
    let n = 8;
    let ops = assemble_layer_operators(&unit(), n).unwrap();
    let z = TrigPolynomial::zero(n);
    assert_eq!(ops.compute_u_infinity(&z, &z), 0.0);
    let l = mode_poly(n, Mode::Cos(1), 1.0);
    let g = mode_poly(n, Mode::Cos(1), -1.0);
    assert!(ops.compute_u_infinity(&l, &g).abs() < 1e-15);
    // constant part of the trace is the far-field value on the unit circle
    assert!((ops.compute_u_infinity(&z, &z.plus_constant(3.0)) - 3.0).abs() < 1e-14);
}

#[test]
fn dipole_representation_off_surface() {
    let n = 32;
    let ops = assemble_layer_operators(&unit(), n).unwrap();
    let sol = ExteriorSolution {
        g: mode_poly(n, Mode::Cos(1), 1.0).plus_constant(3.0),
        lambda: mode_poly(n, Mode::Cos(1), -1.0),
        u_inf: 3.0,
    };
    for th in [0.0, 1.0, 2.5, 4.0] {
        let x = Vec2::from_polar(2.0, th);
        let want = x.x / x.norm_sq() + 3.0;
        assert!((sol.evaluate(&ops, x).unwrap() - want).abs() < 1e-8);
    }
    let far: Vec<f64> = [10.0, 100.0]
        .iter()
        .map(|&r| (sol.evaluate(&ops, Vec2::new(r, 0.0)).unwrap() - 3.0).abs())
        .collect();
    assert!(far[1] < far[0] && (far[0] * 10.0 - 1.0).abs() < 1e-8);
    assert!(matches!(sol.evaluate(&ops, Vec2::new(0.5, 0.0)), Err(BemError::Domain { .. })));
    let flat = ExteriorSolution {
        g: TrigPolynomial::zero(n),
        lambda: TrigPolynomial::zero(n),
        u_inf: 5.0,
    };
    assert_eq!(flat.evaluate(&ops, Vec2::new(3.0, 1.0)).unwrap(), 5.0);
}

#[test]
fn ellipse_exterior_solution_matches_harmonic_field() {
    // u = x/|x|² + 1 is harmonic outside the ellipse with far-field value 1
    let curve = Curve::ellipse(Vec2::new(0.1, 0.05), 1.2, 0.8).unwrap();
    let n = 24;
    let ops = assemble_layer_operators(&curve, n).unwrap();
    let u = |p: Vec2| p.x / p.norm_sq() + 1.0;
    let grad = |p: Vec2| {
        let r2 = p.norm_sq();
        Vec2::new((p.y * p.y - p.x * p.x) / (r2 * r2), -2.0 * p.x * p.y / (r2 * r2))
    };
    let t = hdgbem::bem::nodes(n);
    let lam: Vec<f64> = t.iter().map(|&s| grad(curve.point(s)).dot(curve.normal(s))).collect();
    let lambda = ops.project_samples(&lam).unwrap();
    let g0 = ops.solve_exterior(&lambda).unwrap();
    let gv: Vec<f64> = t.iter().map(|&s| u(curve.point(s))).collect();
    let g_exact = TrigPolynomial::interpolate(n, &gv).unwrap();
    let c = ops.weighted_mean(&g_exact);
    let err = ops.l2_norm(&g0.plus_constant(c).sub(&g_exact));
    assert!(err < 1e-8, "{err:e}");
    let u_inf = ops.compute_u_infinity(&lambda, &g0.plus_constant(c));
    assert!((u_inf - 1.0).abs() < 1e-8, "{u_inf}");
}

#[test]
fn collocation_agrees_on_circle() {
    let n = 8;
    let ops = assemble_layer_operators(&unit(), n).unwrap();
    let l = mode_poly(n, Mode::Cos(2), 1.0).add(&mode_poly(n, Mode::Sin(1), 0.5));
    let g = ops.solve_exterior(&l).unwrap();
    let (gc, _) = ops.solve_exterior_collocation(&l).unwrap();
    for (a, b) in g.coeffs().iter().zip(gc.coeffs()) {
        assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn projection_is_idempotent(c in proptest::collection::vec(-3.0f64..3.0, 12)) {
        let ops = assemble_layer_operators(&Curve::circle(Vec2::new(0.2, 0.0), 0.7).unwrap(), 6).unwrap();
        let p = ops.project_mean_zero(&TrigPolynomial::from_coeffs(6, c).unwrap());
        let q = ops.project_mean_zero(&p);
        prop_assert_eq!(p.coeffs(), q.coeffs());
        prop_assert!(ops.weighted_mean(&p).abs() < 1e-13);
    }

    #[test]
    fn exterior_solution_is_mean_zero(c in proptest::collection::vec(-3.0f64..3.0, 12)) {
        let ops = assemble_layer_operators(&unit(), 6).unwrap();
        let l = ops.project_mean_zero(&TrigPolynomial::from_coeffs(6, c).unwrap());
        let g = ops.solve_exterior(&l).unwrap();
        prop_assert!(ops.weighted_mean(&g).abs() < 1e-13);
    }
}
