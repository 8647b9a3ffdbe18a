use hdgbem::geometry::{
    build_annulus_mesh, build_boundary_map, BoundaryMap, BoundaryTag, Curve, MapStrategy, MappedPoint, UnfittedMesh,
};
use hdgbem::hdg::{path_integral, DgField, HdgSystem, MaterialField, SystemOptions};
use hdgbem::Vec2;

fn annulus(h: f64, strategy: MapStrategy) -> (UnfittedMesh, BoundaryMap, Curve) {
    let g = Curve::circle(Vec2::ZERO, 1.0).unwrap();
    let g0 = Curve::circle(Vec2::ZERO, 0.5).unwrap();
    let m = build_annulus_mesh(&g, &g0, h, 12.0).unwrap();
    let b = build_boundary_map(&m, &g, &g0, strategy).unwrap();
    (m, b, g)
}

fn exact_data<U: Fn(Vec2) -> f64 + Sync>(u: U) -> impl Fn(BoundaryTag, &MappedPoint) -> f64 + Sync {
    move |_, p| u(p.xbar)
}

#[test]
fn zero_data_gives_zero_field() {
    let (m, b, _) = annulus(0.2, MapStrategy::Radial);
    let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &SystemOptions::default()).unwrap();
    let f = sys.solve(&|_| 0.0, &|_, _| 0.0).unwrap();
    assert_eq!(f.max_abs(), 0.0);
}

#[test]
fn patch_test_linear_and_quadratic() {
    let lin = |x: Vec2| 1.0 + 2.0 * x.x - 0.5 * x.y;
    let lin_q = |_: Vec2| Vec2::new(-2.0, 0.5);
    let quad = |x: Vec2| x.x * x.x + x.x * x.y;
    let quad_q = |x: Vec2| Vec2::new(-(2.0 * x.x + x.y), -x.x);
    for strategy in [MapStrategy::Identity, MapStrategy::Radial] {
        let (m, b, _) = annulus(0.2, strategy);
        for k in 1..=3 {
            let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), k, &SystemOptions::default()).unwrap();
            let f = sys.solve(&|_| 0.0, &exact_data(lin)).unwrap();
            let (eq, eu) = sys.l2_errors(&f, lin, lin_q);
            assert!(eq < 1e-9 && eu < 1e-9, "{strategy:?} k={k} linear: {eq:e} {eu:e}");
            if k >= 2 {
                let f = sys.solve(&|_| -2.0, &exact_data(quad)).unwrap();
                let (eq, eu) = sys.l2_errors(&f, quad, quad_q);
                assert!(eq < 1e-9 && eu < 1e-9, "{strategy:?} k={k} quadratic: {eq:e} {eu:e}");
            }
        }
    }
}

#[test]
fn condensed_matches_uncondensed() {
    let (m, b, _) = annulus(0.15, MapStrategy::Radial);
    let kappa = MaterialField::isotropic(|x| 1.0 + 0.3 * x.x * x.x);
    let sys = HdgSystem::build(&m, &b, &kappa, 1, &SystemOptions::default()).unwrap();
    let src = |x: Vec2| x.x.sin() + x.y;
    let data = |t: BoundaryTag, p: &MappedPoint| if t == BoundaryTag::Gamma { p.xbar.x } else { p.xbar.y * p.xbar.y };
    let a = sys.solve(&src, &data).unwrap();
    let c = sys.solve_uncondensed(&src, &data).unwrap();
    let rel = a.max_abs_difference(&c) / c.max_abs();
    assert!(rel < 1e-10, "{rel:e}");
}

#[test]
fn sequential_and_parallel_assembly_agree_bitwise() {
    let (m, b, _) = annulus(0.2, MapStrategy::Radial);
    let mut opts = SystemOptions::default();
    let par = HdgSystem::build(&m, &b, &MaterialField::identity(), 2, &opts).unwrap();
    opts.parallel = false;
    let seq = HdgSystem::build(&m, &b, &MaterialField::identity(), 2, &opts).unwrap();
    assert_eq!(par.matrix().val, seq.matrix().val);
    let data = exact_data(|x| x.x / x.norm_sq());
    assert_eq!(par.solve(&|_| 0.0, &data).unwrap(), seq.solve(&|_| 0.0, &data).unwrap());
}

#[test]
fn fitted_map_adds_no_transfer_terms() {
    let (m, b, _) = annulus(0.2, MapStrategy::Identity);
    let with = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &SystemOptions::default()).unwrap();
    let opts = SystemOptions {
        include_transfer: false,
        ..SystemOptions::default()
    };
    let without = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &opts).unwrap();
    for e in &b.edges {
        let tc = with.transfer_coupling(e.edge).unwrap();
        assert!(tc.a_t.col_iter().all(|c| c.iter().all(|v| *v == 0.0)));
        assert!(tc.b_t.col_iter().all(|c| c.iter().all(|v| *v == 0.0)));
    }
    let a: Vec<_> = with.matrix().triplets().filter(|t| t.2 != 0.0).collect();
    let c: Vec<_> = without.matrix().triplets().filter(|t| t.2 != 0.0).collect();
    assert_eq!(a, c);
}

#[test]
fn conservation_and_trace_identity() {
    let (m, b, _) = annulus(0.1, MapStrategy::Radial);
    for k in [1, 2] {
        let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), k, &SystemOptions::default()).unwrap();
        let src = |x: Vec2| (3.0 * x.x).cos();
        let f = sys.solve(&src, &exact_data(|x| x.y)).unwrap();
        let worst = sys
            .local_conservation_residuals(&f, &src)
            .into_iter()
            .enumerate()
            .map(|(e, r)| r.abs() / (m.element_area(e) + 1.0))
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "k={k}: {worst:e}");
        assert!(sys.trace_identity_residual(&f) < 1e-10);
    }
}

#[test]
fn j_functional_of_unit_field_is_root_perimeter() {
    let (m, b, _) = annulus(0.2, MapStrategy::Radial);
    let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &SystemOptions::default()).unwrap();
    let mut f = DgField::zeros(1, m.num_elements(), m.num_edges());
    // u = 1 through the constant basis function
    for e in 0..m.num_elements() {
        f.u[e * f.np] = 1.0 / sys.space().basis.values(Vec2::new(0.3, 0.3))[0];
    }
    let perimeter: f64 = m.edges.iter().enumerate().filter(|(_, e)| e.is_boundary()).map(|(i, _)| m.edge_length(i)).sum();
    let j = sys.j_functional(&f);
    assert!((j - perimeter.sqrt()).abs() < 1e-12, "{j} vs {}", perimeter.sqrt());
    assert!((sys.j_functional(&f.scaled(-3.0)) - 3.0 * j).abs() < 1e-12);
    assert_eq!(sys.j_functional(&DgField::zeros(1, m.num_elements(), m.num_edges())), 0.0);
}

#[test]
fn transfer_coupling_matches_path_integral() {
    let (m, b, _) = annulus(0.2, MapStrategy::Radial);
    let kappa = MaterialField::isotropic(|x| 2.0 + x.x);
    let sys = HdgSystem::build(&m, &b, &kappa, 2, &SystemOptions::default()).unwrap();
    let np = sys.space().np;
    let em = &b.edges[0];
    let tc = sys.transfer_coupling(em.edge).unwrap();
    // q = (φ_1, 0) of the parent element, extended
    let q = |x: Vec2| Vec2::new(sys.space().basis.values(sys.affine(em.element).to_ref(x))[1], 0.0);
    let want = path_integral(em, &kappa, q, 12);
    for (g, w) in want.iter().enumerate() {
        assert!((tc.path[(g, 1)] - w).abs() < 1e-6 * (1.0 + w.abs()), "{} vs {w}", tc.path[(g, 1)]);
        assert_eq!(tc.path[(g, np + 1)] == 0.0, em.nodes[g].t.y == 0.0);
    }
}

#[test]
fn constant_flux_extrapolates_to_cosine() {
    let (m, b, g) = annulus(0.2, MapStrategy::Radial);
    let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &SystemOptions::default()).unwrap();
    let mut f = DgField::zeros(1, m.num_elements(), m.num_edges());
    let c0 = 1.0 / sys.space().basis.values(Vec2::new(0.3, 0.3))[0];
    for e in 0..m.num_elements() {
        f.q[e * 2 * f.np] = c0;
    }
    let params: Vec<f64> = (0..32).map(|i| i as f64 * std::f64::consts::TAU / 32.0).collect();
    let v = sys.extrapolate_flux(&f, &g, &params).unwrap();
    for (s, val) in params.iter().zip(v) {
        assert!((val - s.cos()).abs() < 1e-12);
    }
}

#[test]
fn polynomial_flux_extrapolates_exactly() {
    let (m, b, g) = annulus(0.2, MapStrategy::Radial);
    let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), 1, &SystemOptions::default()).unwrap();
    let u = |x: Vec2| 2.0 * x.x - x.y;
    let f = sys.solve(&|_| 0.0, &exact_data(u)).unwrap();
    let params: Vec<f64> = (0..40).map(|i| 0.1 + i as f64 * 0.15).collect();
    let v = sys.extrapolate_flux(&f, &g, &params).unwrap();
    for (s, val) in params.iter().zip(v) {
        let want = Vec2::new(-2.0, 1.0).dot(g.normal(*s));
        assert!((val - want).abs() < 1e-10);
    }
}

#[test]
fn dipole_converges_at_optimal_rate() {
    let u = |x: Vec2| x.x / x.norm_sq();
    let q = |x: Vec2| {
        let r2 = x.norm_sq();
        Vec2::new(-(x.y * x.y - x.x * x.x) / (r2 * r2), 2.0 * x.x * x.y / (r2 * r2))
    };
    for k in [1usize, 2] {
        let errs: Vec<(f64, f64)> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| {
                let (m, b, _) = annulus(h, MapStrategy::Radial);
                let sys = HdgSystem::build(&m, &b, &MaterialField::identity(), k, &SystemOptions::default()).unwrap();
                let f = sys.solve(&|_| 0.0, &exact_data(u)).unwrap();
                sys.l2_errors(&f, u, q)
            })
            .collect();
        let rate = |a: f64, b: f64| (a / b).log2();
        let ru = rate(errs[1].1, errs[2].1);
        let rq = rate(errs[1].0, errs[2].0);
        assert!(ru > k as f64 + 0.7 && rq > k as f64 + 0.7, "k={k}: {errs:?}");
    }
}
