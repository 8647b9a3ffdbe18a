//! Orthonormal polynomial bases on the reference triangle and on edges.

use crate::geometry::Vec2;
use crate::quadrature::TriangleRule;

/// Bivariate polynomial with dense monomial coefficients `c[i][j]` of `x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    deg: usize,
    c: Vec<f64>,
}

impl Poly2 {
    pub fn zero(deg: usize) -> Self {
        Poly2 {
            deg,
            c: vec![0.0; (deg + 1) * (deg + 1)],
        }
    }

    pub fn constant(v: f64) -> Self {
        Poly2 { deg: 0, c: vec![v] }
    }

    /// `a + bx x + by y`.
    pub fn linear(a: f64, bx: f64, by: f64) -> Self {
        let mut p = Poly2::zero(1);
        p.set(0, 0, a);
        p.set(1, 0, bx);
        p.set(0, 1, by);
        p
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.deg + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.deg || i > self.deg || j > self.deg {
            0.0
        } else {
            self.c[self.idx(i, j)]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.c[k] = v;
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let d = self.deg.max(o.deg);
        let mut r = Poly2::zero(d);
        for i in 0..=d {
            for j in 0..=d - i {
                r.set(i, j, self.get(i, j) + o.get(i, j));
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2 {
            deg: self.deg,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let d = self.deg + o.deg;
        let mut r = Poly2::zero(d);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let a = self.get(i, j);
                if a == 0.0 {
                    continue;
                }
                for k in 0..=o.deg {
                    for l in 0..=o.deg - k {
                        let v = r.get(i + k, j + l) + a * o.get(k, l);
                        r.set(i + k, j + l, v);
                    }
                }
            }
        }
        r
    }

    pub fn dx(&self) -> Poly2 {
        let d = self.deg.saturating_sub(1);
        let mut r = Poly2::zero(d);
        for i in 1..=self.deg {
            for j in 0..=self.deg - i {
                r.set(i - 1, j, i as f64 * self.get(i, j));
            }
        }
        r
    }

    pub fn dy(&self) -> Poly2 {
        let d = self.deg.saturating_sub(1);
        let mut r = Poly2::zero(d);
        for i in 0..self.deg {
            for j in 1..=self.deg - i {
                r.set(i, j - 1, j as f64 * self.get(i, j));
            }
        }
        r
    }

    /// Horner evaluation in `y` within Horner in `x`; valid at any point.
    pub fn eval(&self, p: Vec2) -> f64 {
        let mut acc = 0.0;
        for i in (0..=self.deg).rev() {
            let mut row = 0.0;
            for j in (0..=self.deg - i).rev() {
                row = row * p.y + self.get(i, j);
            }
            acc = acc * p.x + row;
        }
        acc
    }
}

/// Orthonormal Dubiner basis of `P_k` on the reference triangle `(0,0), (1,0), (0,1)`,
/// ordered by total degree so that the first `dim P_m` functions span `P_m`.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    pub k: usize,
    polys: Vec<Poly2>,
    grads: Vec<(Poly2, Poly2)>,
}

pub fn dim_pk(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

impl ReferenceBasis {
    pub fn new(k: usize) -> Self {
        // collapsed coordinates on (-1,-1), (1,-1), (-1,1): r = 2ξ - 1, s = 2η - 1
        let t = Poly2::linear(1.0, 0.0, -1.0); // (1 - s)/2 = 1 - η
        let xh = Poly2::linear(-1.0, 2.0, 1.0); // (1 + r) - (1 - s)/2
        let s = Poly2::linear(-1.0, 0.0, 2.0);
        let t2 = t.mul(&t);
        // scaled Legendre: Q_p = t^p P_p(xh / t)
        let mut q = vec![Poly2::constant(1.0)];
        if k >= 1 {
            q.push(xh.clone());
        }
        for n in 1..k {
            let a = xh.mul(&q[n]).scale((2 * n + 1) as f64);
            let b = t2.mul(&q[n - 1]).scale(-(n as f64));
            q.push(a.add(&b).scale(1.0 / (n + 1) as f64));
        }
        let rule = TriangleRule::for_degree(2 * k + 2);
        let mut polys = Vec::with_capacity(dim_pk(k));
        for d in 0..=k {
            for p in (0..=d).rev() {
                let qd = d - p;
                let jac = jacobi(qd, (2 * p + 1) as f64, &s);
                let f = q[p].mul(&jac);
                let norm2: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * f.eval(*x).powi(2))
                    .sum();
                polys.push(f.scale(1.0 / norm2.sqrt()));
            }
        }
        let grads = polys.iter().map(|p| (p.dx(), p.dy())).collect();
        ReferenceBasis { k, polys, grads }
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }

    pub fn eval(&self, p: Vec2, out: &mut [f64]) {
        for (o, f) in out.iter_mut().zip(&self.polys) {
            *o = f.eval(p);
        }
    }

    pub fn values(&self, p: Vec2) -> Vec<f64> {
        self.polys.iter().map(|f| f.eval(p)).collect()
    }

    /// Reference gradients.
    pub fn gradients(&self, p: Vec2) -> Vec<Vec2> {
        self.grads.iter().map(|(a, b)| Vec2::new(a.eval(p), b.eval(p))).collect()
    }

    pub fn poly(&self, i: usize) -> &Poly2 {
        &self.polys[i]
    }
}

/// Jacobi polynomial `P_n^{(α,0)}` composed with the polynomial `s`.
fn jacobi(n: usize, alpha: f64, s: &Poly2) -> Poly2 {
    let mut p0 = Poly2::constant(1.0);
    if n == 0 {
        return p0;
    }
    // P_1 = (α + 1) + (α + 2)(s - 1)/2
    let mut p1 = s.scale(0.5 * (alpha + 2.0)).add(&Poly2::constant(alpha + 1.0 - 0.5 * (alpha + 2.0)));
    for m in 1..n {
        let m = m as f64;
        let c = 2.0 * m + alpha;
        let a1 = 2.0 * (m + 1.0) * (m + alpha + 1.0) * c;
        let a2 = (c + 1.0) * alpha * alpha;
        let a3 = (c + 1.0) * (c + 2.0) * c;
        let a4 = 2.0 * (m + alpha) * m * (c + 2.0);
        let next = s
            .mul(&p1)
            .scale(a3)
            .add(&p1.scale(a2))
            .add(&p0.scale(-a4))
            .scale(1.0 / a1);
        p0 = p1;
        p1 = next;
    }
    p1
}

/// Orthonormal Legendre values on an edge of length `len` at local coordinate `z ∈ [0, 1]`.
pub fn edge_basis(k: usize, len: f64, z: f64, out: &mut [f64]) {
    let x = 2.0 * z - 1.0;
    let mut p0 = 1.0;
    let mut p1 = x;
    for (m, o) in out.iter_mut().enumerate().take(k + 1) {
        let pm = if m == 0 {
            1.0
        } else if m == 1 {
            x
        } else {
            let n = (m - 1) as f64;
            let v = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
            p0 = p1;
            p1 = v;
            v
        };
        *o = pm * ((2 * m + 1) as f64 / len).sqrt();
    }
}
