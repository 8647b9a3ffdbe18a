use std::fmt;
use std::sync::Arc;

use crate::geometry::Vec2;

/// Symmetric 2×2 matrix `[[a, b], [b, c]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Sym2 {
    pub const IDENTITY: Sym2 = Sym2 { a: 1.0, b: 0.0, c: 1.0 };

    pub fn scalar(s: f64) -> Self {
        Sym2 { a: s, b: 0.0, c: s }
    }

    pub fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn is_spd(&self) -> bool {
        self.a > 0.0 && self.det() > 0.0 && self.a.is_finite() && self.c.is_finite() && self.b.is_finite()
    }

    pub fn inverse(&self) -> Sym2 {
        let d = self.det();
        Sym2 {
            a: self.c / d,
            b: -self.b / d,
            c: self.a / d,
        }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.b * v.x + self.c * v.y)
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.a,
            (1, 1) => self.c,
            _ => self.b,
        }
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * (self.a + self.c);
        let r = (0.25 * (self.a - self.c).powi(2) + self.b * self.b).sqrt();
        (m - r, m + r)
    }
}

type KappaFn = Arc<dyn Fn(Vec2) -> Sym2 + Send + Sync>;

/// Diffusion coefficient `κ(x)`, symmetric positive definite.
#[derive(Clone)]
pub struct MaterialField {
    kappa: KappaFn,
    identity: bool,
}

impl fmt::Debug for MaterialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialField").field("identity", &self.identity).finish()
    }
}

impl Default for MaterialField {
    fn default() -> Self {
        Self::identity()
    }
}

impl MaterialField {
    pub fn identity() -> Self {
        MaterialField {
            kappa: Arc::new(|_| Sym2::IDENTITY),
            identity: true,
        }
    }

    pub fn constant(k: Sym2) -> Self {
        MaterialField {
            kappa: Arc::new(move |_| k),
            identity: k == Sym2::IDENTITY,
        }
    }

    pub fn isotropic<F: Fn(Vec2) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        MaterialField {
            kappa: Arc::new(move |x| Sym2::scalar(f(x))),
            identity: false,
        }
    }

    pub fn tensor<F: Fn(Vec2) -> Sym2 + Send + Sync + 'static>(f: F) -> Self {
        MaterialField {
            kappa: Arc::new(f),
            identity: false,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn eval(&self, x: Vec2) -> Sym2 {
        (self.kappa)(x)
    }
}
