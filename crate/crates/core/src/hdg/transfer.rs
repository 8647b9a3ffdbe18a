use faer::Mat;

use super::basis::edge_basis;
use super::local::{Affine, HdgSpace};
use super::{HdgError, MaterialField};
use crate::geometry::{EdgeMap, Vec2};
use crate::quadrature::Rule1d;

/// Discretized path integral `∫₀^l κ⁻¹ E q(x + s t) · t ds` for one boundary edge,
/// as a linear map of the parent element's flux coefficients.
#[derive(Debug, Clone)]
pub struct TransferCoupling {
    pub edge: usize,
    pub element: usize,
    /// `path[(g, c)]`: path integral at edge node `g` for flux coefficient `c`
    /// (`c < np` for `q_x`, `np ≤ c < 2 np` for `q_y`).
    pub path: Mat<f64>,
    /// Test against the edge basis: `trace[(m, c)] = ⟨path(c), μ_m⟩_e`.
    pub trace: Mat<f64>,
    /// `𝒜_T(q, v) = ⟨path(q), v·ν_h⟩_e`, flux test rows.
    pub a_t: Mat<f64>,
    /// `ℬ_T(q, w) = ⟨τ path(q), w⟩_e`.
    pub b_t: Mat<f64>,
}

pub fn assemble_transfer(
    em: &EdgeMap,
    aff: &Affine,
    space: &HdgSpace,
    material: &MaterialField,
    tau: f64,
    path_points: usize,
) -> Result<TransferCoupling, HdgError> {
    let np = space.np;
    let ng = em.nodes.len();
    let rule = Rule1d::gauss(path_points);
    let mut path = Mat::<f64>::zeros(ng, 2 * np);
    let mut phi = vec![0.0; np];
    for (g, node) in em.nodes.iter().enumerate() {
        if node.l == 0.0 {
            continue;
        }
        for (s, w) in rule.iter() {
            let y = node.x + node.t * (s * node.l);
            let kappa = material.eval(y);
            if !kappa.is_spd() {
                return Err(HdgError::Material { element: em.element });
            }
            // κ⁻¹ q · t = q · κ⁻¹ t by symmetry
            let kt = kappa.inverse().apply(node.t);
            space.basis.eval(aff.to_ref(y), &mut phi);
            let wl = w * node.l;
            for j in 0..np {
                path[(g, j)] += wl * kt.x * phi[j];
                path[(g, np + j)] += wl * kt.y * phi[j];
            }
        }
    }
    let ne = space.ne;
    let mut trace = Mat::<f64>::zeros(ne, 2 * np);
    let mut a_t = Mat::<f64>::zeros(2 * np, 2 * np);
    let mut b_t = Mat::<f64>::zeros(np, 2 * np);
    let mut mu = vec![0.0; ne];
    for (g, node) in em.nodes.iter().enumerate() {
        let w = em.weights[g];
        edge_basis(space.k, em.length, em.zeta[g], &mut mu);
        space.basis.eval(aff.to_ref(node.x), &mut phi);
        for c in 0..2 * np {
            let p = path[(g, c)];
            if p == 0.0 {
                continue;
            }
            for m in 0..ne {
                trace[(m, c)] += w * p * mu[m];
            }
            for i in 0..np {
                a_t[(i, c)] += w * p * phi[i] * em.nu.x;
                a_t[(np + i, c)] += w * p * phi[i] * em.nu.y;
                b_t[(i, c)] += w * tau * p * phi[i];
            }
        }
    }
    Ok(TransferCoupling {
        edge: em.edge,
        element: em.element,
        path,
        trace,
        a_t,
        b_t,
    })
}

/// Path integral of an explicit flux field at every node of an edge; used to
/// check the discrete coupling.
pub fn path_integral<Q: Fn(Vec2) -> Vec2>(em: &EdgeMap, material: &MaterialField, q: Q, points: usize) -> Vec<f64> {
    let rule = Rule1d::gauss(points);
    em.nodes
        .iter()
        .map(|n| {
            rule.iter()
                .map(|(s, w)| {
                    let y = n.x + n.t * (s * n.l);
                    w * n.l * material.eval(y).inverse().apply(q(y)).dot(n.t)
                })
                .sum()
        })
        .collect()
}
