use faer::prelude::*;
use faer::Mat;

use super::basis::{dim_pk, edge_basis, ReferenceBasis};
use super::local::Affine;
use super::HdgError;
use crate::geometry::Vec2;
use crate::quadrature::{Rule1d, TriangleRule};

/// Element-wise HDG projection `(Π_V q, Π_W u)` onto `[P_k]² × P_k`:
/// moments against `P_{k-1}` are preserved, and on every edge
/// `⟨Π_V q·ν + τ Π_W u, μ⟩_e = ⟨q·ν + τ u, μ⟩_e` for all `μ ∈ P_k(e)`.
#[derive(Debug, Clone)]
pub struct HdgProjection {
    pub k: usize,
    pub vertices: [Vec2; 3],
    /// `[q_x, q_y]` coefficients in the orthonormal reference basis.
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    basis: ReferenceBasis,
    aff: Affine,
}

pub fn hdg_projection<Q, U>(vertices: [Vec2; 3], k: usize, tau: [f64; 3], q: Q, u: U) -> Result<HdgProjection, HdgError>
where
    Q: Fn(Vec2) -> Vec2,
    U: Fn(Vec2) -> f64,
{
    let aff = Affine::new(vertices).ok_or(HdgError::DegenerateElement { element: 0 })?;
    let basis = ReferenceBasis::new(k);
    let np = dim_pk(k);
    let nl = if k == 0 { 0 } else { dim_pk(k - 1) };
    let n = 3 * np;
    let mut a = Mat::<f64>::zeros(n, n);
    let mut b = Mat::<f64>::zeros(n, 1);
    let vol = TriangleRule::for_degree(2 * k + 8);
    let jac = aff.det.abs();
    let mut phi = vec![0.0; np];
    for (xi, w) in vol.points.iter().zip(&vol.weights) {
        let x = aff.to_phys(*xi);
        basis.eval(*xi, &mut phi);
        let (qx, ux) = (q(x), u(x));
        for i in 0..nl {
            let wi = w * jac * phi[i];
            for j in 0..np {
                a[(i, j)] += wi * phi[j];
                a[(nl + i, np + j)] += wi * phi[j];
                a[(2 * nl + i, 2 * np + j)] += wi * phi[j];
            }
            b[(i, 0)] += wi * qx.x;
            b[(nl + i, 0)] += wi * qx.y;
            b[(2 * nl + i, 0)] += wi * ux;
        }
    }
    let edge_rule = Rule1d::gauss(k + 6);
    let mut mu = vec![0.0; k + 1];
    let ccw = aff.det > 0.0;
    for (le, t) in tau.iter().enumerate() {
        if !(*t >= 0.0) {
            return Err(HdgError::InvalidParameter(format!("stabilization τ = {t}")));
        }
        let p0 = vertices[(le + 1) % 3];
        let p1 = vertices[(le + 2) % 3];
        let len = p0.dist(p1);
        let nu = if ccw { (p1 - p0).rot_cw() } else { -(p1 - p0).rot_cw() }.normalized();
        for (z, w) in edge_rule.iter() {
            let x = p0 + (p1 - p0) * z;
            basis.eval(aff.to_ref(x), &mut phi);
            edge_basis(k, len, z, &mut mu);
            let rhs = q(x).dot(nu) + t * u(x);
            for m in 0..=k {
                let row = 3 * nl + le * (k + 1) + m;
                let wm = w * len * mu[m];
                for j in 0..np {
                    a[(row, j)] += wm * phi[j] * nu.x;
                    a[(row, np + j)] += wm * phi[j] * nu.y;
                    a[(row, 2 * np + j)] += wm * t * phi[j];
                }
                b[(row, 0)] += wm * rhs;
            }
        }
    }
    let x = a.partial_piv_lu().solve(&b);
    let resid = &a * &x - &b;
    let scale = (0..n).map(|i| b[(i, 0)].abs()).fold(1.0, f64::max);
    if (0..n).any(|i| !(resid[(i, 0)].abs() <= 1e-8 * scale)) {
        return Err(HdgError::Solver("singular projection system".into()));
    }
    Ok(HdgProjection {
        k,
        vertices,
        q: (0..2 * np).map(|i| x[(i, 0)]).collect(),
        u: (0..np).map(|i| x[(2 * np + i, 0)]).collect(),
        basis,
        aff,
    })
}

impl HdgProjection {
    pub fn eval_q(&self, x: Vec2) -> Vec2 {
        let phi = self.basis.values(self.aff.to_ref(x));
        let np = phi.len();
        let mut v = Vec2::ZERO;
        for (j, p) in phi.iter().enumerate() {
            v += Vec2::new(self.q[j], self.q[np + j]) * *p;
        }
        v
    }

    pub fn eval_u(&self, x: Vec2) -> f64 {
        let phi = self.basis.values(self.aff.to_ref(x));
        phi.iter().zip(&self.u).map(|(p, c)| p * c).sum()
    }

    /// `(‖q - Π_V q‖_T, ‖u - Π_W u‖_T)`.
    pub fn errors<Q: Fn(Vec2) -> Vec2, U: Fn(Vec2) -> f64>(&self, q: Q, u: U) -> (f64, f64) {
        let vol = TriangleRule::for_degree(2 * self.k + 8);
        let jac = self.aff.det.abs();
        let (mut eq, mut eu) = (0.0, 0.0);
        for (xi, w) in vol.points.iter().zip(&vol.weights) {
            let x = self.aff.to_phys(*xi);
            eq += w * jac * (q(x) - self.eval_q(x)).norm_sq();
            eu += w * jac * (u(x) - self.eval_u(x)).powi(2);
        }
        (eq.sqrt(), eu.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        let v = [Vec2::new(0.1, 0.0), Vec2::new(0.9, 0.2), Vec2::new(0.3, 0.8)];
        for k in 0..4 {
            let q = move |x: Vec2| Vec2::new(x.x.powi(k as i32) + 0.5, 1.0 - 2.0 * x.y.powi(k as i32));
            let u = move |x: Vec2| 3.0 * x.x.powi(k as i32 / 2) * x.y.powi(k as i32 - k as i32 / 2) - 0.25;
            let p = hdg_projection(v, k, [1.0, 2.0, 0.5], q, u).unwrap();
            let (eq, eu) = p.errors(q, u);
            assert!(eq < 1e-12 && eu < 1e-12, "k={k}: {eq:e} {eu:e}");
        }
    }
}
