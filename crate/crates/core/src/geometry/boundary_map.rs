use super::curve::param_delta;
use super::{BoundaryTag, Curve, GeometryError, UnfittedMesh, Vec2};
use crate::quadrature::Rule1d;

/// How points of the polygonal boundary are assigned to points of the true curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStrategy {
    /// Along rays from the curve's center (circles) or centroid.
    Radial,
    /// Along the shortest segment to the curve.
    ClosestPoint,
    /// Each point maps to itself; for meshes whose boundary is the true boundary.
    Identity,
}

/// A quadrature node of a boundary edge together with its image on the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedPoint {
    pub x: Vec2,
    pub xbar: Vec2,
    /// Curve parameter of `xbar`.
    pub s: f64,
    /// Length of the transfer segment from `x` to `xbar`.
    pub l: f64,
    /// Unit direction of the transfer segment; the edge normal when `l = 0`.
    pub t: Vec2,
    /// Unit normal of `∂Ω` at `xbar`, pointing out of `Ω`.
    pub normal: Vec2,
}

#[derive(Debug, Clone)]
pub struct EdgeMap {
    pub edge: usize,
    pub element: usize,
    pub local: usize,
    pub tag: BoundaryTag,
    /// Outward unit normal `ν_h` of the edge.
    pub nu: Vec2,
    pub length: f64,
    /// Node positions along the edge in `[0, 1]`, from the lower-index vertex.
    pub zeta: Vec<f64>,
    /// Physical quadrature weights (they sum to `length`).
    pub weights: Vec<f64>,
    pub nodes: Vec<MappedPoint>,
    /// Images of the two endpoints, in edge order.
    pub ends: [MappedPoint; 2],
}

/// Per-edge boundary data for every edge of `Γ_h ∪ Γ_{0,h}`.
#[derive(Debug, Clone)]
pub struct BoundaryMap {
    pub strategy: MapStrategy,
    pub edges: Vec<EdgeMap>,
    lookup: Vec<Option<usize>>,
}

/// Lower bound on `t · ν_h` for an admissible transfer direction.
pub const TANGENCY_FLOOR: f64 = 0.1;
pub const DEFAULT_EDGE_NODES: usize = 6;

pub fn build_boundary_map(
    mesh: &UnfittedMesh,
    gamma: &Curve,
    gamma0: &Curve,
    strategy: MapStrategy,
) -> Result<BoundaryMap, GeometryError> {
    build_boundary_map_with(mesh, gamma, gamma0, strategy, DEFAULT_EDGE_NODES)
}

pub fn build_boundary_map_with(
    mesh: &UnfittedMesh,
    gamma: &Curve,
    gamma0: &Curve,
    strategy: MapStrategy,
    nodes_per_edge: usize,
) -> Result<BoundaryMap, GeometryError> {
    let rule = Rule1d::gauss(nodes_per_edge);
    let mut edges = Vec::new();
    let mut lookup = vec![None; mesh.num_edges()];
    for (id, e) in mesh.edges.iter().enumerate() {
        let Some(tag) = e.tag else { continue };
        let (element, local) = e.left;
        let curve = match tag {
            BoundaryTag::Gamma => gamma,
            BoundaryTag::Gamma0 => gamma0,
        };
        let (a, b) = mesh.edge_endpoints(id);
        let nu = mesh.outward_normal(id, element);
        let length = a.dist(b);
        let map = |x: Vec2| map_point(x, nu, curve, tag, strategy).map_err(|reason| GeometryError::MapConstruction { edge: id, reason });
        let ends = [map(a)?, map(b)?];
        let mut nodes = Vec::with_capacity(rule.len());
        for &z in &rule.nodes {
            nodes.push(map(a + (b - a) * z)?);
        }
        if strategy != MapStrategy::Identity {
            check_monotone(&ends, &nodes).map_err(|reason| GeometryError::MapConstruction { edge: id, reason })?;
        }
        lookup[id] = Some(edges.len());
        edges.push(EdgeMap {
            edge: id,
            element,
            local,
            tag,
            nu,
            length,
            zeta: rule.nodes.clone(),
            weights: rule.weights.iter().map(|w| w * length).collect(),
            nodes,
            ends,
        });
    }
    Ok(BoundaryMap { strategy, edges, lookup })
}

fn map_point(x: Vec2, nu: Vec2, curve: &Curve, tag: BoundaryTag, strategy: MapStrategy) -> Result<MappedPoint, String> {
    let s = match strategy {
        MapStrategy::Radial => radial_param(curve, x)?,
        MapStrategy::ClosestPoint | MapStrategy::Identity => curve.closest_param(x),
    };
    let xbar = if strategy == MapStrategy::Identity { x } else { curve.point(s) };
    let sign = match tag {
        BoundaryTag::Gamma => 1.0,
        BoundaryTag::Gamma0 => -1.0,
    };
    let normal = if strategy == MapStrategy::Identity {
        nu
    } else {
        curve.normal(s) * sign
    };
    let d = xbar - x;
    let l = d.norm();
    let t = if l > 1e-14 { d * (1.0 / l) } else { nu };
    if l > 1e-14 && t.dot(nu) < TANGENCY_FLOOR {
        return Err(format!("transfer direction nearly tangent (t·ν = {:.3})", t.dot(nu)));
    }
    Ok(MappedPoint { x, xbar, s, l, t, normal })
}

fn radial_param(curve: &Curve, x: Vec2) -> Result<f64, String> {
    if curve.as_circle().is_some() {
        return Ok(curve.closest_param(x));
    }
    // ray from the centroid of the enclosed region
    let c = centroid(curve);
    let dir = x - c;
    let mut s = curve.closest_param(x);
    for _ in 0..60 {
        let f = (curve.point(s) - c).cross(dir);
        let fp = curve.derivative(s).cross(dir);
        if fp.abs() < 1e-300 {
            return Err("radial map is singular".into());
        }
        let ds = f / fp;
        s -= ds.clamp(-0.2, 0.2);
        if ds.abs() < 1e-15 {
            break;
        }
    }
    if (curve.point(s) - c).dot(dir) <= 0.0 {
        return Err("radial map left the ray".into());
    }
    Ok(super::curve::wrap_param(s))
}

fn centroid(curve: &Curve) -> Vec2 {
    let m = 1024;
    let h = std::f64::consts::TAU / m as f64;
    let mut acc = Vec2::ZERO;
    let mut area = 0.0;
    for i in 0..m {
        let p = curve.point(i as f64 * h);
        let q = curve.point((i + 1) as f64 * h);
        let a = p.cross(q);
        area += a;
        acc += (p + q) * a;
    }
    acc * (1.0 / (3.0 * area))
}

/// The image of an edge must traverse its arc in one direction.
fn check_monotone(ends: &[MappedPoint; 2], nodes: &[MappedPoint]) -> Result<(), String> {
    let seq: Vec<f64> = std::iter::once(ends[0].s)
        .chain(nodes.iter().map(|n| n.s))
        .chain(std::iter::once(ends[1].s))
        .collect();
    let total = param_delta(seq[0], seq[seq.len() - 1]);
    if total == 0.0 {
        return Err("edge maps to a single curve point".into());
    }
    for w in seq.windows(2) {
        if param_delta(w[0], w[1]) * total <= 0.0 {
            return Err("boundary map folds along the edge".into());
        }
    }
    Ok(())
}

impl BoundaryMap {
    pub fn for_edge(&self, edge: usize) -> Option<&EdgeMap> {
        self.lookup.get(edge).copied().flatten().map(|i| &self.edges[i])
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &EdgeMap> {
        self.edges.iter().filter(move |e| e.tag == tag)
    }

    /// The `Γ_h` edge whose image arc contains the curve parameter `s`.
    pub fn locate_on_gamma(&self, s: f64) -> Option<&EdgeMap> {
        self.edges_with_tag(BoundaryTag::Gamma).find(|em| {
            let d = param_delta(em.ends[0].s, em.ends[1].s);
            let off = param_delta(em.ends[0].s, s);
            let frac = off / d;
            (-1e-12..=1.0 + 1e-12).contains(&frac)
        })
    }

    /// Largest `|ν_h - n|` over all boundary nodes.
    pub fn max_normal_deviation(&self) -> f64 {
        self.edges
            .iter()
            .flat_map(|em| em.nodes.iter().map(move |p| (em.nu - p.normal).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_transfer_length(&self) -> f64 {
        self.edges
            .iter()
            .flat_map(|em| em.nodes.iter().map(|p| p.l))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_annulus_mesh;

    fn setup(h: f64) -> (UnfittedMesh, Curve, Curve) {
        let g = Curve::circle(Vec2::ZERO, 1.0).unwrap();
        let g0 = Curve::circle(Vec2::ZERO, 0.5).unwrap();
        (build_annulus_mesh(&g, &g0, h, 12.0).unwrap(), g, g0)
    }

    #[test]
    fn radial_map_lands_on_curves() {
        let (m, g, g0) = setup(0.1);
        let bm = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
        for em in &bm.edges {
            let r = if em.tag == BoundaryTag::Gamma { 1.0 } else { 0.5 };
            for p in &em.nodes {
                assert!((p.xbar.norm() - r).abs() < 1e-14);
                assert!((p.x + p.t * p.l - p.xbar).norm() < 1e-13);
                assert!(p.t.dot(em.nu) >= TANGENCY_FLOOR);
            }
        }
    }

    #[test]
    fn gamma_arcs_cover_the_circle() {
        let (m, g, g0) = setup(0.1);
        let bm = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
        for i in 0..500 {
            let s = std::f64::consts::TAU * i as f64 / 500.0;
            assert!(bm.locate_on_gamma(s).is_some(), "s = {s}");
        }
    }

    #[test]
    fn normal_deviation_is_first_order() {
        let d: Vec<f64> = [0.2, 0.1]
            .iter()
            .map(|&h| {
                let (m, g, g0) = setup(h);
                build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap().max_normal_deviation()
            })
            .collect();
        assert!(d[1] < 0.7 * d[0], "{d:?}");
    }

    #[test]
    fn closest_point_agrees_with_radial_on_circles() {
        let (m, g, g0) = setup(0.2);
        let a = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
        let b = build_boundary_map(&m, &g, &g0, MapStrategy::ClosestPoint).unwrap();
        for (ea, eb) in a.edges.iter().zip(&b.edges) {
            for (p, q) in ea.nodes.iter().zip(&eb.nodes) {
                assert!((p.xbar - q.xbar).norm() < 1e-12);
            }
        }
    }
}
