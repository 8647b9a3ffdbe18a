use std::f64::consts::TAU;

use super::{BemError, LayerOperatorSet, TrigPolynomial};
use crate::geometry::{Curve, Vec2};

/// Exterior densities and far-field constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorSolution {
    /// Dirichlet trace on `Γ`, including its constant part.
    pub g: TrigPolynomial,
    /// Exterior normal derivative on `Γ`, mean-zero.
    pub lambda: TrigPolynomial,
    pub u_inf: f64,
}

/// Relative standoff from `Γ` below which exterior evaluation is refused.
pub const DEFAULT_STANDOFF: f64 = 1e-6;

impl ExteriorSolution {
    /// `u(x) = 𝒟g(x) - 𝒮λ(x) + u_∞` by the trapezoid rule.
    pub fn evaluate(&self, ops: &LayerOperatorSet, x: Vec2) -> Result<f64, BemError> {
        evaluate_exterior(ops.curve(), &self.g, &self.lambda, self.u_inf, x, DEFAULT_STANDOFF)
    }
}

fn diameter(curve: &Curve) -> f64 {
    match curve.as_circle() {
        Some((_, r)) => 2.0 * r,
        None => {
            let p: Vec<Vec2> = (0..256).map(|i| curve.point(TAU * i as f64 / 256.0)).collect();
            p.iter().flat_map(|a| p.iter().map(move |b| a.dist(*b))).fold(0.0, f64::max)
        }
    }
}

pub fn evaluate_exterior(
    curve: &Curve,
    g: &TrigPolynomial,
    lambda: &TrigPolynomial,
    u_inf: f64,
    x: Vec2,
    standoff: f64,
) -> Result<f64, BemError> {
    let diam = diameter(curve);
    if curve.contains(x) || curve.distance(x) <= standoff * diam {
        return Err(BemError::Domain { x: x.x, y: x.y });
    }
    let m = (16 * g.degree().max(lambda.degree())).max(2048);
    let h = TAU / m as f64;
    let mut acc = 0.0;
    for l in 0..m {
        let s = l as f64 * h;
        let y = curve.point(s);
        let d = x - y;
        let r2 = d.norm_sq();
        let speed = curve.speed(s);
        let dl = d.dot(curve.normal(s)) / (TAU * r2);
        let sl = -(r2.ln()) / (2.0 * TAU);
        acc += h * speed * (dl * g.eval(s) - sl * lambda.eval(s));
    }
    Ok(acc + u_inf)
}
