//! Gauss rules on the unit interval and collapsed Gauss rules on the reference triangle.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::geometry::Vec2;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    pub fn gauss(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(1)).expect("positive");
        let gl = GaussLegendre::new(n);
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Rule1d {
            nodes: pairs.iter().map(|p| 0.5 * (p.0 + 1.0)).collect(),
            weights: pairs.iter().map(|p| 0.5 * p.1).collect(),
        }
    }

    /// Smallest Gauss rule exact for degree `deg`.
    pub fn for_degree(deg: usize) -> Self {
        Self::gauss(deg / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Rule on the reference triangle `(0,0), (1,0), (0,1)`; weights sum to 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Collapsed tensor Gauss rule exact for total degree `deg`.
    pub fn for_degree(deg: usize) -> Self {
        // the collapsed direction carries one extra power from the Jacobian
        let n = (deg + 2) / 2 + 1;
        let g = Rule1d::gauss(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (b, wb) in g.iter() {
            for (a, wa) in g.iter() {
                points.push(Vec2::new(a * (1.0 - b), b));
                weights.push(wa * wb * (1.0 - b));
            }
        }
        TriangleRule { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn interval_rule_is_exact_to_degree() {
        for n in 1..8 {
            let r = Rule1d::gauss(n);
            for p in 0..(2 * n) as i32 {
                let s: f64 = r.iter().map(|(x, w)| w * x.powi(p)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_integrates_monomials() {
        for deg in 0..12 {
            let r = TriangleRule::for_degree(deg);
            for i in 0..=deg as u32 {
                let j = deg as u32 - i;
                let s: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(p, w)| w * p.x.powi(i as i32) * p.y.powi(j as i32))
                    .sum();
                let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                assert!((s - exact).abs() < 1e-14, "deg={deg} i={i}");
            }
        }
    }
}
