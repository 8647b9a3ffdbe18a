use faer::Mat;

use super::basis::{dim_pk, edge_basis, ReferenceBasis};
use super::{HdgError, MaterialField};
use crate::geometry::{UnfittedMesh, Vec2};
use crate::quadrature::{Rule1d, TriangleRule};

/// Affine map from the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub v0: Vec2,
    pub e1: Vec2,
    pub e2: Vec2,
    pub det: f64,
}

impl Affine {
    pub fn new(v: [Vec2; 3]) -> Option<Self> {
        let e1 = v[1] - v[0];
        let e2 = v[2] - v[0];
        let det = e1.cross(e2);
        (det.abs() > 0.0 && det.is_finite()).then_some(Affine { v0: v[0], e1, e2, det })
    }

    pub fn to_phys(&self, xi: Vec2) -> Vec2 {
        self.v0 + self.e1 * xi.x + self.e2 * xi.y
    }

    /// Inverse map; valid for any point of the plane.
    pub fn to_ref(&self, x: Vec2) -> Vec2 {
        let d = x - self.v0;
        Vec2::new(
            (self.e2.y * d.x - self.e2.x * d.y) / self.det,
            (-self.e1.y * d.x + self.e1.x * d.y) / self.det,
        )
    }

    /// Pulls a reference gradient back to physical coordinates (`J^{-T} g`).
    pub fn grad(&self, g: Vec2) -> Vec2 {
        Vec2::new(
            (self.e2.y * g.x - self.e1.y * g.y) / self.det,
            (-self.e2.x * g.x + self.e1.x * g.y) / self.det,
        )
    }
}

/// Discrete spaces of degree `k` and the quadrature rules used with them.
#[derive(Debug, Clone)]
pub struct HdgSpace {
    pub k: usize,
    pub basis: ReferenceBasis,
    /// `dim P_k(T)`.
    pub np: usize,
    /// `dim P_k(e)`.
    pub ne: usize,
    pub volume_rule: TriangleRule,
    pub edge_rule: Rule1d,
}

impl HdgSpace {
    pub fn new(k: usize) -> Self {
        HdgSpace {
            k,
            basis: ReferenceBasis::new(k),
            np: dim_pk(k),
            ne: k + 1,
            // two extra orders for variable coefficients and data
            volume_rule: TriangleRule::for_degree(2 * k + 4),
            edge_rule: Rule1d::for_degree(2 * k + 2),
        }
    }

    /// Size of the local unknown vector `(q_x, q_y, u)`.
    pub fn local_dim(&self) -> usize {
        3 * self.np
    }
}

/// Local HDG equations `M X + N û = F` and the flux-balance rows `R X - τ û`
/// of an element, where `X = (q_x, q_y, u)` and `û` are the traces on its three edges.
#[derive(Debug, Clone)]
pub struct LocalBlocks {
    pub m: Mat<f64>,
    pub n: Mat<f64>,
    pub r: Mat<f64>,
}

/// Parametrization of local edge `i`: the global edge runs from its lower-index vertex.
pub(crate) struct EdgeFrame {
    pub a: Vec2,
    pub b: Vec2,
    pub len: f64,
    pub nu: Vec2,
}

pub(crate) fn edge_frame(mesh: &UnfittedMesh, element: usize, local: usize) -> EdgeFrame {
    let ge = mesh.element_edges[element][local];
    let (a, b) = mesh.edge_endpoints(ge);
    EdgeFrame {
        a,
        b,
        len: a.dist(b),
        nu: mesh.outward_normal(ge, element),
    }
}

pub fn assemble_local(
    mesh: &UnfittedMesh,
    element: usize,
    space: &HdgSpace,
    material: &MaterialField,
    tau: [f64; 3],
) -> Result<LocalBlocks, HdgError> {
    let aff = Affine::new(mesh.element_vertices(element)).ok_or(HdgError::DegenerateElement { element })?;
    let (np, ne) = (space.np, space.ne);
    let jac = aff.det.abs();
    let mut m = Mat::<f64>::zeros(3 * np, 3 * np);
    let mut phi = vec![0.0; np];
    for (xi, w) in space.volume_rule.points.iter().zip(&space.volume_rule.weights) {
        let x = aff.to_phys(*xi);
        let kappa = material.eval(x);
        if !kappa.is_spd() {
            return Err(HdgError::Material { element });
        }
        let kinv = kappa.inverse();
        space.basis.eval(*xi, &mut phi);
        let grads: Vec<Vec2> = space.basis.gradients(*xi).into_iter().map(|g| aff.grad(g)).collect();
        let wj = w * jac;
        for i in 0..np {
            for j in 0..np {
                let pp = wj * phi[i] * phi[j];
                for a in 0..2 {
                    for b in 0..2 {
                        m[(a * np + i, b * np + j)] += kinv.get(a, b) * pp;
                    }
                }
                // -(u, div v) and (div q, w)
                let gi = grads[i];
                let gj = grads[j];
                m[(i, 2 * np + j)] -= wj * phi[j] * gi.x;
                m[(np + i, 2 * np + j)] -= wj * phi[j] * gi.y;
                m[(2 * np + i, j)] += wj * gj.x * phi[i];
                m[(2 * np + i, np + j)] += wj * gj.y * phi[i];
            }
        }
    }
    let mut n = Mat::<f64>::zeros(3 * np, 3 * ne);
    let mut r = Mat::<f64>::zeros(3 * ne, 3 * np);
    let mut mu = vec![0.0; ne];
    for (le, &t) in tau.iter().enumerate() {
        let f = edge_frame(mesh, element, le);
        for (z, w) in space.edge_rule.iter() {
            let x = f.a + (f.b - f.a) * z;
            let wl = w * f.len;
            space.basis.eval(aff.to_ref(x), &mut phi);
            edge_basis(space.k, f.len, z, &mut mu);
            for i in 0..np {
                for j in 0..np {
                    m[(2 * np + i, 2 * np + j)] += wl * t * phi[i] * phi[j];
                }
                for (mi, &mv) in mu.iter().enumerate() {
                    let c = le * ne + mi;
                    let pm = wl * phi[i] * mv;
                    n[(i, c)] += pm * f.nu.x;
                    n[(np + i, c)] += pm * f.nu.y;
                    n[(2 * np + i, c)] -= t * pm;
                    r[(c, i)] += pm * f.nu.x;
                    r[(c, np + i)] += pm * f.nu.y;
                    r[(c, 2 * np + i)] += t * pm;
                }
            }
        }
    }
    Ok(LocalBlocks { m, n, r })
}

/// Right-hand side `(f, w)_T` in the `u` rows.
pub(crate) fn load_vector(aff: &Affine, space: &HdgSpace, f: &(dyn Fn(Vec2) -> f64 + Sync)) -> Vec<f64> {
    let np = space.np;
    let mut out = vec![0.0; 3 * np];
    let mut phi = vec![0.0; np];
    let jac = aff.det.abs();
    for (xi, w) in space.volume_rule.points.iter().zip(&space.volume_rule.weights) {
        let fx = f(aff.to_phys(*xi));
        if fx == 0.0 {
            continue;
        }
        space.basis.eval(*xi, &mut phi);
        for i in 0..np {
            out[2 * np + i] += w * jac * fx * phi[i];
        }
    }
    out
}
