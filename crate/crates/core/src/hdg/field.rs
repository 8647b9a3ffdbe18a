use super::{HdgError, HdgSystem};
use crate::geometry::{Curve, Vec2};

/// Discrete solution: per-element coefficients of `q_h` and `u_h` in the
/// reference basis, and one coefficient block of `û_h` per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DgField {
    pub k: usize,
    /// Coefficients per scalar block on an element.
    pub np: usize,
    /// Coefficients per edge block.
    pub ne: usize,
    /// `[q_x (np), q_y (np)]` per element.
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    pub uhat: Vec<f64>,
    /// Relative residual of the trace solve.
    pub residual: f64,
}

impl DgField {
    pub fn zeros(k: usize, elements: usize, edges: usize) -> Self {
        let np = (k + 1) * (k + 2) / 2;
        DgField {
            k,
            np,
            ne: k + 1,
            q: vec![0.0; 2 * np * elements],
            u: vec![0.0; np * elements],
            uhat: vec![0.0; (k + 1) * edges],
            residual: 0.0,
        }
    }

    pub fn num_elements(&self) -> usize {
        self.u.len() / self.np
    }

    pub fn q_block(&self, e: usize) -> &[f64] {
        &self.q[2 * self.np * e..2 * self.np * (e + 1)]
    }

    pub fn u_block(&self, e: usize) -> &[f64] {
        &self.u[self.np * e..self.np * (e + 1)]
    }

    pub fn uhat_block(&self, edge: usize) -> &[f64] {
        &self.uhat[self.ne * edge..self.ne * (edge + 1)]
    }

    pub fn scaled(&self, a: f64) -> DgField {
        let s = |v: &Vec<f64>| v.iter().map(|x| a * x).collect();
        DgField {
            q: s(&self.q),
            u: s(&self.u),
            uhat: s(&self.uhat),
            ..self.clone()
        }
    }

    pub fn max_abs_difference(&self, o: &DgField) -> f64 {
        self.q
            .iter()
            .zip(&o.q)
            .chain(self.u.iter().zip(&o.u))
            .chain(self.uhat.iter().zip(&o.uhat))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().chain(&self.u).chain(&self.uhat).map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl HdgSystem {
    /// `u_h` of element `e` evaluated at `x`; points outside the element extrapolate.
    pub fn eval_u(&self, field: &DgField, e: usize, x: Vec2) -> f64 {
        let phi = self.space.basis.values(self.affine[e].to_ref(x));
        phi.iter().zip(field.u_block(e)).map(|(p, c)| p * c).sum()
    }

    /// `q_h` of element `e` evaluated at `x`; points outside the element extrapolate.
    pub fn eval_q(&self, field: &DgField, e: usize, x: Vec2) -> Vec2 {
        let phi = self.space.basis.values(self.affine[e].to_ref(x));
        let qb = field.q_block(e);
        let np = field.np;
        let mut q = Vec2::ZERO;
        for (j, p) in phi.iter().enumerate() {
            q += Vec2::new(qb[j], qb[np + j]) * *p;
        }
        q
    }

    /// `E q_h · n` at the curve points `y(s_j)` of `Γ`, where `E` extends the
    /// flux of the element whose patch contains the point and `n` is the outward normal.
    pub fn extrapolate_flux(&self, field: &DgField, gamma: &Curve, params: &[f64]) -> Result<Vec<f64>, HdgError> {
        params
            .iter()
            .map(|&s| {
                let em = self.bmap.locate_on_gamma(s).ok_or(HdgError::Coverage { param: s })?;
                Ok(self.eval_q(field, em.element, gamma.point(s)).dot(gamma.normal(s)))
            })
            .collect()
    }
}
