use std::collections::BTreeMap;

use super::{Curve, GeometryError, Vec2};

/// Which curve a boundary edge of the polygonal domain approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Edge of `Γ_h`, facing the artificial circle `Γ`.
    Gamma,
    /// Edge of `Γ_{0,h}`, facing the obstacle `Γ₀`.
    Gamma0,
}

impl BoundaryTag {
    pub fn code(self) -> u8 {
        match self {
            BoundaryTag::Gamma => 0,
            BoundaryTag::Gamma0 => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(BoundaryTag::Gamma),
            1 => Some(BoundaryTag::Gamma0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first; edge-local coordinates run from the first to the second.
    pub vertices: [usize; 2],
    /// First adjacent element and the local edge index within it.
    pub left: (usize, usize),
    pub right: Option<(usize, usize)>,
    pub tag: Option<BoundaryTag>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// Conforming triangulation of the polygonal subdomain `Ω_h`.
///
/// Elements are counter-clockwise. Local edge `i` of an element joins its
/// vertices `i+1` and `i+2` (mod 3), i.e. it is opposite vertex `i`.
/// Edges are ordered lexicographically by their sorted vertex pair.
#[derive(Debug, Clone)]
pub struct UnfittedMesh {
    pub vertices: Vec<Vec2>,
    pub elements: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    pub element_edges: Vec<[usize; 3]>,
}

pub fn local_edge_vertices(i: usize) -> (usize, usize) {
    ((i + 1) % 3, (i + 2) % 3)
}

impl UnfittedMesh {
    /// Builds topology from raw triangles; boundary edges are tagged by `tag`,
    /// which receives the two endpoints of each boundary edge.
    pub fn from_triangles<F>(
        vertices: Vec<Vec2>,
        mut elements: Vec<[usize; 3]>,
        tag: F,
    ) -> Result<Self, GeometryError>
    where
        F: Fn(Vec2, Vec2) -> BoundaryTag,
    {
        for (e, tri) in elements.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(GeometryError::Topology(format!("element {e} references missing vertex")));
            }
            let [a, b, c] = *tri;
            let area2 = (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
            if area2 == 0.0 {
                return Err(GeometryError::MeshingFailure {
                    element: e,
                    reason: "degenerate element".into(),
                });
            }
            if area2 < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut map: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (e, tri) in elements.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = local_edge_vertices(i);
                let (p, q) = (tri[a], tri[b]);
                map.entry((p.min(q), p.max(q))).or_default().push((e, i));
            }
        }
        let mut edges = Vec::with_capacity(map.len());
        let mut element_edges = vec![[usize::MAX; 3]; elements.len()];
        for ((p, q), adj) in map {
            if adj.len() > 2 {
                return Err(GeometryError::Topology(format!("edge ({p}, {q}) has {} elements", adj.len())));
            }
            let id = edges.len();
            for &(e, i) in &adj {
                element_edges[e][i] = id;
            }
            let t = if adj.len() == 1 {
                Some(tag(vertices[p], vertices[q]))
            } else {
                None
            };
            edges.push(Edge {
                vertices: [p, q],
                left: adj[0],
                right: adj.get(1).copied(),
                tag: t,
            });
        }
        Ok(UnfittedMesh {
            vertices,
            elements,
            edges,
            element_edges,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn element_vertices(&self, e: usize) -> [Vec2; 3] {
        let t = self.elements[e];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        0.5 * (b - a).cross(c - a)
    }

    /// Longest edge of the element.
    pub fn element_diameter(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        a.dist(b).max(b.dist(c)).max(c.dist(a))
    }

    pub fn element_inradius(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        let per = a.dist(b) + b.dist(c) + c.dist(a);
        2.0 * self.element_area(e) / per
    }

    /// Ratio of diameter to inradius; `2√3` for an equilateral triangle.
    pub fn shape_ratio(&self, e: usize) -> f64 {
        self.element_diameter(e) / self.element_inradius(e)
    }

    pub fn max_shape_ratio(&self) -> (usize, f64) {
        (0..self.num_elements())
            .map(|e| (e, self.shape_ratio(e)))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    /// Mesh size: the largest element diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.element_diameter(e)).fold(0.0, f64::max)
    }

    pub fn edge_endpoints(&self, edge: usize) -> (Vec2, Vec2) {
        let [a, b] = self.edges[edge].vertices;
        (self.vertices[a], self.vertices[b])
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let (a, b) = self.edge_endpoints(edge);
        a.dist(b)
    }

    /// Unit normal of `edge` pointing out of `element`.
    pub fn outward_normal(&self, edge: usize, element: usize) -> Vec2 {
        let (a, b) = self.edge_endpoints(edge);
        let n = (b - a).rot_cw().normalized();
        let c = self.element_centroid(element);
        if n.dot(a - c) >= 0.0 {
            n
        } else {
            -n
        }
    }

    pub fn element_centroid(&self, e: usize) -> Vec2 {
        let [a, b, c] = self.element_vertices(e);
        (a + b + c) * (1.0 / 3.0)
    }

    pub fn boundary_edges(&self, tag: BoundaryTag) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.tag == Some(tag))
            .map(|(i, _)| i)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.element_area(e)).sum()
    }

    /// Distances of boundary edges to their target curves, scaled by the parent size.
    pub fn proximity(&self, gamma: &Curve, gamma0: &Curve) -> ProximityReport {
        let mut r_h: f64 = 0.0;
        let mut max_dist: f64 = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            let Some(tag) = e.tag else { continue };
            let curve = match tag {
                BoundaryTag::Gamma => gamma,
                BoundaryTag::Gamma0 => gamma0,
            };
            let d = edge_curve_distance(self, i, curve);
            max_dist = max_dist.max(d);
            r_h = r_h.max(d / self.element_diameter(e.left.0));
        }
        ProximityReport {
            r_h,
            max_distance: max_dist,
            h: self.mesh_size(),
        }
    }
}

/// Largest distance from points of an edge to a curve.
pub(crate) fn edge_curve_distance(mesh: &UnfittedMesh, edge: usize, curve: &Curve) -> f64 {
    let (a, b) = mesh.edge_endpoints(edge);
    if let Some((c, r)) = curve.as_circle() {
        // distance to a circle is largest at an endpoint or at the closest point to the center
        let ab = b - a;
        let t = ((c - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        let foot = a + ab * t;
        [a, b, foot]
            .iter()
            .map(|p| (p.dist(c) - r).abs())
            .fold(0.0, f64::max)
    } else {
        (0..=16)
            .map(|i| curve.distance(a + (b - a) * (i as f64 / 16.0)))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityReport {
    /// `max_e d(e, ∂Ω) / h_{T_e}` over boundary edges.
    pub r_h: f64,
    pub max_distance: f64,
    pub h: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> UnfittedMesh {
        let v = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        UnfittedMesh::from_triangles(v, vec![[0, 1, 2], [0, 3, 2]], |_, _| BoundaryTag::Gamma).unwrap()
    }

    #[test]
    fn topology_of_two_triangles() {
        let m = square();
        assert_eq!(m.num_edges(), 5);
        assert_eq!(m.edges.iter().filter(|e| e.is_boundary()).count(), 4);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        for e in 0..2 {
            assert!(m.element_area(e) > 0.0);
        }
        let keys: Vec<_> = m.edges.iter().map(|e| e.vertices).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn element_edges_match_local_convention() {
        let m = square();
        for (e, tri) in m.elements.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = local_edge_vertices(i);
                let mut want = [tri[a], tri[b]];
                want.sort();
                assert_eq!(m.edges[m.element_edges[e][i]].vertices, want);
            }
        }
    }

    #[test]
    fn outward_normal_points_away() {
        let m = square();
        for (i, e) in m.edges.iter().enumerate() {
            if e.is_boundary() {
                let n = m.outward_normal(i, e.left.0);
                let (a, b) = m.edge_endpoints(i);
                let mid = (a + b) * 0.5;
                assert!(n.dot(mid - Vec2::new(0.5, 0.5)) > 0.0);
            }
        }
    }
}
