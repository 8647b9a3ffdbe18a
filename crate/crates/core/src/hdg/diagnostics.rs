use super::basis::edge_basis;
use super::local::edge_frame;
use super::{DgField, HdgSystem, Source};
use crate::geometry::Vec2;

impl HdgSystem {
    fn uhat_at(&self, field: &DgField, edge: usize, len: f64, z: f64) -> f64 {
        let mut mu = vec![0.0; field.ne];
        edge_basis(field.k, len, z, &mut mu);
        mu.iter().zip(field.uhat_block(edge)).map(|(a, b)| a * b).sum()
    }

    /// Per element: `⟨q̂·ν, 1⟩_{∂T} - (f, 1)_T` with `q̂·ν = q·ν + τ(u - û)`.
    pub fn local_conservation_residuals(&self, field: &DgField, f: Source<'_>) -> Vec<f64> {
        (0..self.mesh.num_elements())
            .map(|e| {
                let mut flux = 0.0;
                for li in 0..3 {
                    let fr = edge_frame(&self.mesh, e, li);
                    let ge = self.mesh.element_edges[e][li];
                    let t = self.tau[e][li];
                    for (z, w) in self.space.edge_rule.iter() {
                        let x = fr.a + (fr.b - fr.a) * z;
                        let qn = self.eval_q(field, e, x).dot(fr.nu);
                        let jump = self.eval_u(field, e, x) - self.uhat_at(field, ge, fr.len, z);
                        flux += w * fr.len * (qn + t * jump);
                    }
                }
                let aff = &self.affine[e];
                let src: f64 = self
                    .space
                    .volume_rule
                    .points
                    .iter()
                    .zip(&self.space.volume_rule.weights)
                    .map(|(xi, w)| w * aff.det.abs() * f(aff.to_phys(*xi)))
                    .sum();
                flux - src
            })
            .collect()
    }

    /// Largest edge `L²` norm of `û - (⟦q⟧ + τ⁺u⁺ + τ⁻u⁻)/(τ⁺ + τ⁻)` over interior edges.
    pub fn trace_identity_residual(&self, field: &DgField) -> f64 {
        let mut worst: f64 = 0.0;
        for (ge, edge) in self.mesh.edges.iter().enumerate() {
            let Some((e2, l2)) = edge.right else { continue };
            let (e1, l1) = edge.left;
            let f1 = edge_frame(&self.mesh, e1, l1);
            let f2 = edge_frame(&self.mesh, e2, l2);
            let (t1, t2) = (self.tau[e1][l1], self.tau[e2][l2]);
            let mut acc = 0.0;
            for (z, w) in self.space.edge_rule.iter() {
                let x = f1.a + (f1.b - f1.a) * z;
                let jump = self.eval_q(field, e1, x).dot(f1.nu) + self.eval_q(field, e2, x).dot(f2.nu);
                let want = (jump + t1 * self.eval_u(field, e1, x) + t2 * self.eval_u(field, e2, x)) / (t1 + t2);
                acc += w * f1.len * (self.uhat_at(field, ge, f1.len, z) - want).powi(2);
            }
            worst = worst.max(acc.sqrt());
        }
        worst
    }

    /// Energy-type functional
    /// `(‖κ^{-1/2} q‖² + ‖τ^{1/2} u‖²_{∂Ω_h} + ‖τ^{1/2}(u - {{u}})‖²_{interior faces} + ‖τ^{-1/2}⟦q⟧‖²_{interior edges})^{1/2}`.
    pub fn j_functional(&self, field: &DgField) -> f64 {
        let mut total = 0.0;
        for e in 0..self.mesh.num_elements() {
            let aff = &self.affine[e];
            for (xi, w) in self.space.volume_rule.points.iter().zip(&self.space.volume_rule.weights) {
                let x = aff.to_phys(*xi);
                let q = self.eval_q(field, e, x);
                total += w * aff.det.abs() * q.dot(self.material.eval(x).inverse().apply(q));
            }
        }
        for edge in &self.mesh.edges {
            let (e1, l1) = edge.left;
            let f1 = edge_frame(&self.mesh, e1, l1);
            for (z, w) in self.space.edge_rule.iter() {
                let x = f1.a + (f1.b - f1.a) * z;
                let wl = w * f1.len;
                let u1 = self.eval_u(field, e1, x);
                match edge.right {
                    None => total += wl * self.tau[e1][l1] * u1 * u1,
                    Some((e2, l2)) => {
                        let f2 = edge_frame(&self.mesh, e2, l2);
                        let u2 = self.eval_u(field, e2, x);
                        let avg = 0.5 * (u1 + u2);
                        let (t1, t2) = (self.tau[e1][l1], self.tau[e2][l2]);
                        total += wl * (t1 * (u1 - avg).powi(2) + t2 * (u2 - avg).powi(2));
                        let jump = self.eval_q(field, e1, x).dot(f1.nu) + self.eval_q(field, e2, x).dot(f2.nu);
                        total += wl * jump * jump / (0.5 * (t1 + t2));
                    }
                }
            }
        }
        total.sqrt()
    }

    /// `(‖κ^{-1/2}(q - q_h)‖_{Ω_h}, ‖u - u_h‖_{Ω_h})`.
    pub fn l2_errors<U, Q>(&self, field: &DgField, u: U, q: Q) -> (f64, f64)
    where
        U: Fn(Vec2) -> f64,
        Q: Fn(Vec2) -> Vec2,
    {
        let (mut eq, mut eu) = (0.0, 0.0);
        for e in 0..self.mesh.num_elements() {
            let aff = &self.affine[e];
            for (xi, w) in self.space.volume_rule.points.iter().zip(&self.space.volume_rule.weights) {
                let x = aff.to_phys(*xi);
                let wj = w * aff.det.abs();
                let dq = q(x) - self.eval_q(field, e, x);
                eq += wj * dq.dot(self.material.eval(x).inverse().apply(dq));
                eu += wj * (u(x) - self.eval_u(field, e, x)).powi(2);
            }
        }
        (eq.sqrt(), eu.sqrt())
    }

    /// `‖u_h‖_{Ω_h}`.
    pub fn u_norm(&self, field: &DgField) -> f64 {
        self.l2_errors(field, |_| 0.0, |_| Vec2::ZERO).1
    }
}
