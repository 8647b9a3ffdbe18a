use std::f64::consts::PI;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{BoundaryTag, Curve, GeometryError, UnfittedMesh, Vec2};

/// Controls how far the polygonal boundary sits from the true curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Offset of boundary rings is `offset_factor * h^offset_exponent`.
    pub offset_factor: f64,
    pub offset_exponent: f64,
    /// Largest admissible diameter-to-inradius ratio.
    pub regularity_bound: f64,
    /// Laplacian smoothing sweeps applied to interior vertices.
    pub smoothing_sweeps: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            offset_factor: 0.5,
            offset_exponent: 1.5,
            regularity_bound: 12.0,
            smoothing_sweeps: 3,
        }
    }
}

/// Triangulates the annular region between `gamma0` (inner) and `gamma` (outer)
/// without fitting either curve: both boundaries of the mesh are polygons
/// strictly inside the annulus whose distance to the curves shrinks faster than `h`.
pub fn build_annulus_mesh(
    gamma: &Curve,
    gamma0: &Curve,
    target_h: f64,
    regularity_bound: f64,
) -> Result<UnfittedMesh, GeometryError> {
    let opts = MeshOptions {
        regularity_bound,
        ..MeshOptions::default()
    };
    build_annulus_mesh_with(gamma, gamma0, target_h, &opts)
}

pub fn build_annulus_mesh_with(
    gamma: &Curve,
    gamma0: &Curve,
    target_h: f64,
    opts: &MeshOptions,
) -> Result<UnfittedMesh, GeometryError> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!("mesh size {target_h}")));
    }
    let gap = annulus_gap(gamma, gamma0)?;
    let base = opts.offset_factor * target_h.powf(opts.offset_exponent);
    let off_outer = base + sagitta(gamma, target_h, gamma.as_circle().is_none());
    let off_inner = base + sagitta(gamma0, target_h, true);
    if gap - off_outer - off_inner < 0.75 * target_h {
        return Err(GeometryError::Infeasible { gap, h: target_h });
    }

    let outer = ring(gamma, target_h, -off_outer);
    let inner = ring(gamma0, target_h, off_inner);
    let clearance = 0.55 * target_h;
    let mut interior = lattice(&outer, target_h)
        .into_iter()
        .filter(|&p| {
            point_in_polygon(p, &outer)
                && !point_in_polygon(p, &inner)
                && gamma.distance(p) > off_outer + clearance
                && gamma0.distance(p) > off_inner + clearance
        })
        .collect::<Vec<_>>();

    let mut tri = triangulate(&outer, &inner, &interior)?;
    for _ in 0..opts.smoothing_sweeps {
        smooth(&mut interior, &tri, outer.len() + inner.len());
        tri = triangulate(&outer, &inner, &interior)?;
    }

    let (verts, elems) = tri;
    let mesh = UnfittedMesh::from_triangles(verts, elems, |a, b| {
        let mid = (a + b) * 0.5;
        if gamma.distance(mid) <= gamma0.distance(mid) {
            BoundaryTag::Gamma
        } else {
            BoundaryTag::Gamma0
        }
    })?;
    check_mesh(&mesh, gamma, gamma0, opts.regularity_bound)?;
    Ok(mesh)
}

/// Smallest distance between the two curves, after checking nesting.
fn annulus_gap(gamma: &Curve, gamma0: &Curve) -> Result<f64, GeometryError> {
    if let (Some((c, r)), Some((c0, r0))) = (gamma.as_circle(), gamma0.as_circle()) {
        let gap = r - c.dist(c0) - r0;
        if gap <= 0.0 {
            return Err(GeometryError::InvalidCurve("obstacle is not strictly inside the artificial boundary".into()));
        }
        return Ok(gap);
    }
    let m = 1024;
    let mut gap = f64::INFINITY;
    for i in 0..m {
        let p = gamma0.point(2.0 * PI * i as f64 / m as f64);
        if !gamma.contains(p) {
            return Err(GeometryError::InvalidCurve("obstacle is not strictly inside the artificial boundary".into()));
        }
        gap = gap.min(gamma.distance(p));
    }
    Ok(gap)
}

/// Extra offset so that chords between ring points never cross the curve.
fn sagitta(curve: &Curve, h: f64, needed: bool) -> f64 {
    if needed {
        0.25 * h * h * curve.max_curvature()
    } else {
        0.0
    }
}

/// Points at arclength spacing at most `h`, shifted by `offset` along the outward normal.
fn ring(curve: &Curve, h: f64, offset: f64) -> Vec<Vec2> {
    let m = ((curve.length() / h).ceil() as usize).max(8);
    curve
        .equal_arclength_params(m)
        .into_iter()
        .map(|s| curve.point(s) + curve.normal(s) * offset)
        .collect()
}

fn lattice(outer: &[Vec2], h: f64) -> Vec<Vec2> {
    let (mut lo, mut hi) = (outer[0], outer[0]);
    for p in outer {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let dy = h * 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    let mut row = 0usize;
    let mut y = lo.y;
    while y <= hi.y {
        let shift = if row % 2 == 1 { 0.5 * h } else { 0.0 };
        let mut x = lo.x + shift;
        while x <= hi.x {
            pts.push(Vec2::new(x, y));
            x += h;
        }
        y += dy;
        row += 1;
    }
    pts
}

pub(crate) fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

type Triangles = (Vec<Vec2>, Vec<[usize; 3]>);

/// Constrained Delaunay triangulation of both rings plus interior points,
/// restricted to the region between the rings. Vertices keep input order:
/// outer ring, inner ring, interior points.
fn triangulate(outer: &[Vec2], inner: &[Vec2], interior: &[Vec2]) -> Result<Triangles, GeometryError> {
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let all: Vec<Vec2> = outer.iter().chain(inner).chain(interior).copied().collect();
    let mut handles = Vec::with_capacity(all.len());
    for p in &all {
        let h = cdt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| GeometryError::Topology(format!("triangulation insert: {e:?}")))?;
        handles.push(h);
    }
    if cdt.num_vertices() != all.len() {
        return Err(GeometryError::Topology("duplicate mesh vertices".into()));
    }
    for (start, len) in [(0, outer.len()), (outer.len(), inner.len())] {
        for i in 0..len {
            let a = handles[start + i];
            let b = handles[start + (i + 1) % len];
            if !cdt.can_add_constraint(a, b) {
                return Err(GeometryError::Topology("boundary ring self-intersects".into()));
            }
            cdt.add_constraint(a, b);
        }
    }
    if cdt.num_vertices() != all.len() {
        return Err(GeometryError::Topology("constraint split a ring edge".into()));
    }
    let index_of: Vec<usize> = {
        let mut m = vec![usize::MAX; cdt.num_vertices()];
        for (i, h) in handles.iter().enumerate() {
            m[h.index()] = i;
        }
        m
    };
    let mut elems = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let ids = [
            index_of[vs[0].fix().index()],
            index_of[vs[1].fix().index()],
            index_of[vs[2].fix().index()],
        ];
        let c = (all[ids[0]] + all[ids[1]] + all[ids[2]]) * (1.0 / 3.0);
        if point_in_polygon(c, outer) && !point_in_polygon(c, inner) {
            elems.push(ids);
        }
    }
    Ok((all, elems))
}

/// Moves interior vertices (index `>= fixed`) to the mean of their neighbours.
fn smooth(interior: &mut [Vec2], tri: &Triangles, fixed: usize) {
    let (verts, elems) = tri;
    let mut sum = vec![Vec2::ZERO; verts.len()];
    let mut cnt = vec![0usize; verts.len()];
    for t in elems {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    sum[t[i]] += verts[t[j]];
                    cnt[t[i]] += 1;
                }
            }
        }
    }
    for (k, p) in interior.iter_mut().enumerate() {
        let v = fixed + k;
        if cnt[v] > 0 {
            *p = sum[v] * (1.0 / cnt[v] as f64);
        }
    }
}

fn check_mesh(mesh: &UnfittedMesh, gamma: &Curve, gamma0: &Curve, bound: f64) -> Result<(), GeometryError> {
    // every vertex used, every boundary vertex on exactly two boundary edges
    let nv = mesh.vertices.len();
    let mut used = vec![false; nv];
    for t in &mesh.elements {
        for &v in t {
            used[v] = true;
        }
    }
    if let Some(v) = used.iter().position(|u| !u) {
        return Err(GeometryError::Topology(format!("vertex {v} is not in any element")));
    }
    let mut bdeg = vec![0usize; nv];
    for e in mesh.edges.iter().filter(|e| e.is_boundary()) {
        bdeg[e.vertices[0]] += 1;
        bdeg[e.vertices[1]] += 1;
    }
    if let Some(v) = bdeg.iter().position(|&d| d != 0 && d != 2) {
        return Err(GeometryError::Topology(format!("boundary pinches at vertex {v}")));
    }
    // annulus: V - E + F = 0
    let euler = nv as i64 - mesh.num_edges() as i64 + mesh.num_elements() as i64;
    if euler != 0 {
        return Err(GeometryError::Topology(format!("Euler characteristic {euler}, expected 0")));
    }
    for (e, _) in mesh.elements.iter().enumerate() {
        let ratio = mesh.shape_ratio(e);
        if !(ratio <= bound) {
            return Err(GeometryError::MeshingFailure {
                element: e,
                reason: format!("shape ratio {ratio:.3} exceeds {bound}"),
            });
        }
        for p in mesh.element_vertices(e) {
            if !gamma.contains(p) || gamma0.contains(p) {
                return Err(GeometryError::MeshingFailure {
                    element: e,
                    reason: "vertex outside the annulus".into(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circles() -> (Curve, Curve) {
        (
            Curve::circle(Vec2::ZERO, 1.0).unwrap(),
            Curve::circle(Vec2::ZERO, 0.5).unwrap(),
        )
    }

    #[test]
    fn annulus_mesh_is_valid_and_unfitted() {
        let (g, g0) = circles();
        let m = build_annulus_mesh(&g, &g0, 0.1, 12.0).unwrap();
        let exact = PI * (1.0 - 0.25);
        let area = m.total_area();
        assert!(area < exact && area > 0.9 * exact);
        let rep = m.proximity(&g, &g0);
        assert!(rep.max_distance > 0.0);
        assert!(rep.r_h < 0.5);
        assert!(m.boundary_edges(BoundaryTag::Gamma).count() > 0);
        assert!(m.boundary_edges(BoundaryTag::Gamma0).count() > 0);
    }

    #[test]
    fn proximity_ratio_shrinks() {
        let (g, g0) = circles();
        let r: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| build_annulus_mesh(&g, &g0, h, 12.0).unwrap().proximity(&g, &g0).r_h)
            .collect();
        assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
    }

    #[test]
    fn thin_gap_is_infeasible() {
        let g = Curve::circle(Vec2::ZERO, 1.0).unwrap();
        let g0 = Curve::circle(Vec2::ZERO, 0.9).unwrap();
        assert!(matches!(
            build_annulus_mesh(&g, &g0, 0.5, 12.0),
            Err(GeometryError::Infeasible { .. })
        ));
    }

    #[test]
    fn ellipse_annulus_meshes() {
        let g = Curve::ellipse(Vec2::ZERO, 1.2, 0.9).unwrap();
        let g0 = Curve::ellipse(Vec2::new(0.05, 0.0), 0.5, 0.35).unwrap();
        let m = build_annulus_mesh(&g, &g0, 0.1, 12.0).unwrap();
        assert!(m.num_elements() > 100);
    }
}
