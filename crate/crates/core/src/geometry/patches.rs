use super::curve::param_delta;
use super::{BoundaryMap, BoundaryTag, Curve, GeometryError, MapStrategy, Vec2};
use crate::quadrature::Rule1d;

/// Curved region between a boundary edge and the arc of the true curve it maps to.
///
/// Parametrized by `P(ξ, η) = (1 - η) x_e(ξ) + η y(s(ξ))` on the unit square.
#[derive(Debug, Clone)]
pub struct ExtensionPatch {
    pub edge: usize,
    pub element: usize,
    pub tag: BoundaryTag,
    /// Edge endpoints in edge order.
    pub x: [Vec2; 2],
    pub xbar: [Vec2; 2],
    /// Curve parameter at `xbar[0]` and signed parameter increment to `xbar[1]`.
    pub s0: f64,
    pub ds: f64,
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// Area from the quadrature rule.
    pub area: f64,
}

pub fn build_extension_patches(
    bmap: &BoundaryMap,
    gamma: &Curve,
    gamma0: &Curve,
    order: usize,
) -> Result<Vec<ExtensionPatch>, GeometryError> {
    let rule = Rule1d::for_degree(order.max(4));
    let mut out = Vec::with_capacity(bmap.edges.len());
    for em in &bmap.edges {
        let curve = match em.tag {
            BoundaryTag::Gamma => gamma,
            BoundaryTag::Gamma0 => gamma0,
        };
        let x = [em.ends[0].x, em.ends[1].x];
        let xbar = [em.ends[0].xbar, em.ends[1].xbar];
        let s0 = em.ends[0].s;
        let ds = param_delta(s0, em.ends[1].s);
        let identity = bmap.strategy == MapStrategy::Identity;
        let arc = |xi: f64| {
            if identity {
                (xbar[0] + (xbar[1] - xbar[0]) * xi, xbar[1] - xbar[0])
            } else {
                let s = s0 + ds * xi;
                (curve.point(s), curve.derivative(s) * ds)
            }
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let (mut pos, mut neg) = (false, false);
        let scale = em.length * em.length;
        for (xi, wx) in rule.iter() {
            let xe = x[0] + (x[1] - x[0]) * xi;
            let (ya, dya) = arc(xi);
            for (eta, we) in rule.iter() {
                let p = xe * (1.0 - eta) + ya * eta;
                let dxi = (x[1] - x[0]) * (1.0 - eta) + dya * eta;
                let deta = ya - xe;
                let det = dxi.cross(deta);
                if det > 1e-13 * scale {
                    pos = true;
                } else if det < -1e-13 * scale {
                    neg = true;
                }
                points.push(p);
                weights.push(wx * we * det.abs());
            }
        }
        if pos && neg {
            return Err(GeometryError::PatchFold { edge: em.edge });
        }
        let area = weights.iter().sum();
        out.push(ExtensionPatch {
            edge: em.edge,
            element: em.element,
            tag: em.tag,
            x,
            xbar,
            s0,
            ds,
            points,
            weights,
            area,
        });
    }
    Ok(out)
}

impl ExtensionPatch {
    /// Area from the boundary integral `½∮ x dy - y dx`, independent of the interior rule.
    pub fn boundary_area(&self, curve: &Curve) -> f64 {
        let seg = |a: Vec2, b: Vec2| 0.5 * a.cross(b);
        let mut a = seg(self.x[0], self.x[1]) + seg(self.x[1], self.xbar[1]) + seg(self.xbar[0], self.x[0]);
        if self.x[0] == self.xbar[0] && self.x[1] == self.xbar[1] {
            a += seg(self.xbar[1], self.xbar[0]);
        } else {
            let g = Rule1d::gauss(24);
            let arc: f64 = g
                .iter()
                .map(|(xi, w)| {
                    let s = self.s0 + self.ds * xi;
                    w * curve.point(s).cross(curve.derivative(s) * self.ds)
                })
                .sum();
            a -= 0.5 * arc;
        }
        a.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_mesh, build_boundary_map};
    use std::f64::consts::PI;

    #[test]
    fn patches_fill_the_gap() {
        let g = Curve::circle(Vec2::ZERO, 1.0).unwrap();
        let g0 = Curve::circle(Vec2::ZERO, 0.5).unwrap();
        let m = build_annulus_mesh(&g, &g0, 0.1, 12.0).unwrap();
        let bm = build_boundary_map(&m, &g, &g0, MapStrategy::Radial).unwrap();
        let patches = build_extension_patches(&bm, &g, &g0, 8).unwrap();
        let total: f64 = patches.iter().map(|p| p.area).sum::<f64>() + m.total_area();
        assert!((total - PI * 0.75).abs() < 1e-10, "{total}");
        for p in &patches {
            let c = if p.tag == BoundaryTag::Gamma { &g } else { &g0 };
            assert!((p.area - p.boundary_area(c)).abs() < 1e-12 * (1.0 + p.area));
        }
    }
}
