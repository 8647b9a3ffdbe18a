use hdgbem::geometry::{
    build_annulus_mesh, build_boundary_map, build_extension_patches, mesh_to_string, parse_mesh, read_mesh, write_mesh,
    BoundaryTag, Curve, GeometryError, MapStrategy,
};
use hdgbem::Vec2;
use proptest::prelude::*;

fn curves() -> (Curve, Curve) {
    (Curve::circle(Vec2::ZERO, 1.0).unwrap(), Curve::circle(Vec2::ZERO, 0.5).unwrap())
}

#[test]
fn mesh_file_roundtrip() {
    let (g, g0) = curves();
    let m = build_annulus_mesh(&g, &g0, 0.15, 12.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.txt");
    write_mesh(&m, &p).unwrap();
    let back = read_mesh(&p).unwrap();
    assert_eq!(back.elements, m.elements);
    assert_eq!(back.edges.len(), m.edges.len());
    assert_eq!(mesh_to_string(&back), mesh_to_string(&m));
    assert!(parse_mesh("garbage\n").is_err());
}

#[test]
fn proximity_and_normal_deviation_shrink_under_refinement() {
    let (g, g0) = curves();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for h in [0.2, 0.1, 0.05] {
        let m = build_annulus_mesh(&g, &g0, h, 12.0).unwrap();
        let b = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
        let r = m.proximity(&g, &g0).r_h;
        let d = b.max_normal_deviation();
        assert!(r < last.0 && d < last.1, "h={h}: {r} {d}");
        last = (r, d);
    }
}

#[test]
fn mesh_plus_patches_fill_the_annulus() {
    let (g, g0) = curves();
    let m = build_annulus_mesh(&g, &g0, 0.1, 12.0).unwrap();
    let b = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
    let patches = build_extension_patches(&b, &g, &g0, 8).unwrap();
    let total = m.total_area() + patches.iter().map(|p| p.area).sum::<f64>();
    let exact = std::f64::consts::PI * 0.75;
    assert!((total - exact).abs() < 1e-3 * exact, "{total} vs {exact}");
    assert!(m.boundary_edges(BoundaryTag::Gamma).count() > m.boundary_edges(BoundaryTag::Gamma0).count());
}

#[test]
fn too_coarse_mesh_is_infeasible() {
    let (g, g0) = curves();
    assert!(matches!(build_annulus_mesh(&g, &g0, 0.4, 12.0), Err(GeometryError::Infeasible { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn ellipse_meshes_are_valid(a in 1.0f64..1.4, h in 0.1f64..0.2) {
        let g = Curve::ellipse(Vec2::ZERO, a, 1.0).unwrap();
        let g0 = Curve::circle(Vec2::new(0.05, 0.0), 0.45).unwrap();
        let m = build_annulus_mesh(&g, &g0, h, 12.0).unwrap();
        prop_assert!(m.max_shape_ratio().1 <= 12.0);
        for e in 0..m.num_elements() {
            prop_assert!(m.element_area(e) > 0.0);
        }
        let b = build_boundary_map(&m, &g, &g0, MapStrategy::ClosestPoint).unwrap();
        prop_assert_eq!(b.edges.len(), m.edges.iter().filter(|e| e.is_boundary()).count());
    }
}
