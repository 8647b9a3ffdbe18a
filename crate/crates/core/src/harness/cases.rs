use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::HarnessError;
use crate::geometry::{Curve, Vec2};
use crate::hdg::MaterialField;

type ScalarFn = Arc<dyn Fn(Vec2) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    Dipole,
    DipolePlusConstant,
    VariableKappaBump,
    PolynomialPatch,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::Dipole,
        CaseId::DipolePlusConstant,
        CaseId::VariableKappaBump,
        CaseId::PolynomialPatch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Dipole => "dipole",
            CaseId::DipolePlusConstant => "dipole-plus-constant",
            CaseId::VariableKappaBump => "variable-kappa-bump",
            CaseId::PolynomialPatch => "polynomial-patch",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::UnknownCase(s.to_string()))
    }
}

/// Geometry and constants shared by all cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub gamma_radius: f64,
    pub gamma0_radius: f64,
    /// Additive constant of the plus-constant case.
    pub constant: f64,
    /// Polynomial degree of the patch case.
    pub patch_degree: usize,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            gamma_radius: 1.0,
            gamma0_radius: 0.5,
            constant: 3.0,
            patch_degree: 1,
        }
    }
}

/// Exact solution pair `(u, q = -κ∇u)` with the data it induces.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub params: CaseParams,
    pub gamma: Curve,
    pub gamma0: Curve,
    pub kappa: MaterialField,
    /// Name of the material, `identity` or `bump`.
    pub kappa_kind: &'static str,
    pub u: ScalarFn,
    pub q: VectorFn,
    pub f: ScalarFn,
    /// Value at infinity of the exterior solution; `None` for interior-only cases.
    pub u_inf: Option<f64>,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("id", &self.id)
            .field("params", &self.params)
            .finish()
    }
}

fn dipole_grad(x: Vec2) -> Vec2 {
    let r2 = x.norm_sq();
    Vec2::new((x.y * x.y - x.x * x.x) / (r2 * r2), -2.0 * x.x * x.y / (r2 * r2))
}

/// Smooth radial bump supported in the middle three fifths of the annulus.
fn bump(r0: f64, r1: f64) -> (impl Fn(Vec2) -> f64 + Clone, impl Fn(Vec2) -> Vec2 + Clone) {
    let mid = 0.5 * (r0 + r1);
    let half = 0.3 * (r1 - r0);
    let value = move |x: Vec2| {
        let s = (x.norm() - mid) / half;
        if s.abs() >= 1.0 {
            0.0
        } else {
            0.5 * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    };
    let grad = move |x: Vec2| {
        let r = x.norm();
        let s = (r - mid) / half;
        if s.abs() >= 1.0 {
            return Vec2::ZERO;
        }
        let d = 1.0 - s * s;
        let b = 0.5 * (1.0 - 1.0 / d).exp();
        // d/dr of exp(1 - 1/(1 - s²)) = exp(..) · (-2s / (1 - s²)²) / half
        let db = b * (-2.0 * s / (d * d)) / half;
        x * (db / r)
    };
    (value, grad)
}

pub fn manufactured_case(id: CaseId, params: CaseParams) -> Result<ManufacturedCase, HarnessError> {
    if !(params.gamma0_radius > 0.0 && params.gamma_radius > params.gamma0_radius) {
        return Err(HarnessError::Config {
            key: "geometry.gamma_radius".into(),
            msg: format!(
                "radii must satisfy 0 < {} < {}",
                params.gamma0_radius, params.gamma_radius
            ),
        });
    }
    let gamma = Curve::circle(Vec2::ZERO, params.gamma_radius)?;
    let gamma0 = Curve::circle(Vec2::ZERO, params.gamma0_radius)?;
    let dipole = |x: Vec2| x.x / x.norm_sq();
    let case = match id {
        CaseId::Dipole | CaseId::DipolePlusConstant => {
            let c = if id == CaseId::Dipole { 0.0 } else { params.constant };
            ManufacturedCase {
                id,
                params,
                gamma,
                gamma0,
                kappa: MaterialField::identity(),
                kappa_kind: "identity",
                u: Arc::new(move |x| dipole(x) + c),
                q: Arc::new(|x| -dipole_grad(x)),
                f: Arc::new(|_| 0.0),
                u_inf: Some(c),
            }
        }
        CaseId::VariableKappaBump => {
            let (b, db) = bump(params.gamma0_radius, params.gamma_radius);
            let b2 = b.clone();
            let db2 = db.clone();
            ManufacturedCase {
                id,
                params,
                gamma,
                gamma0,
                kappa: MaterialField::isotropic(move |x| 1.0 + b(x)),
                kappa_kind: "bump",
                u: Arc::new(dipole),
                q: Arc::new(move |x| -dipole_grad(x) * (1.0 + b2(x))),
                // -div((1+β)∇u) with Δu = 0
                f: Arc::new(move |x| -db2(x).dot(dipole_grad(x))),
                u_inf: Some(0.0),
            }
        }
        CaseId::PolynomialPatch => {
            let quad = params.patch_degree >= 2;
            let s = if quad { 1.0 } else { 0.0 };
            ManufacturedCase {
                id,
                params,
                gamma,
                gamma0,
                kappa: MaterialField::identity(),
                kappa_kind: "identity",
                u: Arc::new(move |x| 1.0 + 2.0 * x.x - 0.5 * x.y + s * (x.x * x.x + x.x * x.y)),
                q: Arc::new(move |x| Vec2::new(-2.0 - s * (2.0 * x.x + x.y), 0.5 - s * x.x)),
                f: Arc::new(move |_| -2.0 * s),
                u_inf: None,
            }
        }
    };
    Ok(case)
}

impl ManufacturedCase {
    pub fn has_exterior(&self) -> bool {
        self.u_inf.is_some()
    }

    /// Exact Dirichlet trace on `Γ` at parameter `t`.
    pub fn g_exact(&self, t: f64) -> f64 {
        (self.u)(self.gamma.point(t))
    }

    /// Exact exterior Neumann trace `∂_n u` on `Γ`, `n` pointing away from the obstacle.
    /// Outside the bump support this equals `-q·n`.
    pub fn lambda_exact(&self, t: f64) -> f64 {
        -(self.q)(self.gamma.point(t)).dot(self.gamma.normal(t))
    }

    /// Residuals `(|κ⁻¹q + ∇u|, |∇·q - f|)` at `x`, both scaled by `1 + |q(x)| + |f(x)|`.
    ///
    /// Derivatives are taken from averages over small circles around `x`
    /// (spectrally accurate trapezoid rule) with Richardson extrapolation in
    /// the radius, so the check does not reuse any closed-form derivative.
    pub fn pde_residual(&self, x: Vec2) -> (f64, f64) {
        let grad_u = disk_derivative(x, |y, n| n * (self.u)(y));
        let div_q = disk_derivative(x, |y, n| Vec2::new((self.q)(y).dot(n), 0.0)).x;
        let q = (self.q)(x);
        let f = (self.f)(x);
        let scale = 1.0 + q.norm() + f.abs();
        let flux = self.kappa.eval(x).inverse().apply(q) + grad_u;
        (flux.norm() / scale, (div_q - f).abs() / scale)
    }
}

/// `(1/(πρ²)) ∮_{|y-x|=ρ} h(y, n) ds`, extrapolated to `ρ → 0`.
fn disk_derivative<H: Fn(Vec2, Vec2) -> Vec2>(x: Vec2, h: H) -> Vec2 {
    let avg = |rho: f64| {
        let m = 64;
        let mut acc = Vec2::ZERO;
        for j in 0..m {
            let n = Vec2::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            acc += h(x + n * rho, n);
        }
        acc * (2.0 / (rho * m as f64))
    };
    // the disk average is the point value plus even powers of ρ
    let mut t: Vec<Vec2> = (0..4).map(|i| avg(1e-3 * 0.5f64.powi(i))).collect();
    let mut factor = 4.0;
    while t.len() > 1 {
        t = t.windows(2).map(|w| (w[1] * factor - w[0]) * (1.0 / (factor - 1.0))).collect();
        factor *= 4.0;
    }
    t[0]
}
