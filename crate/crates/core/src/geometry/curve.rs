use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use super::{GeometryError, Vec2};

type CurveFn = Arc<dyn Fn(f64) -> Vec2 + Send + Sync>;

/// Smooth closed curve parametrized over `[0, 2π)`, counter-clockwise.
#[derive(Clone)]
pub enum Curve {
    Circle { center: Vec2, radius: f64 },
    Parametric(ParametricCurve),
}

/// General smooth parametrization with its first two derivatives.
#[derive(Clone)]
pub struct ParametricCurve {
    pos: CurveFn,
    d1: CurveFn,
    d2: CurveFn,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Circle { center, radius } => f
                .debug_struct("Circle")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Curve::Parametric(_) => f.write_str("Parametric"),
        }
    }
}

/// Wraps a parameter into `[0, 2π)`.
pub fn wrap_param(s: f64) -> f64 {
    let w = s.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed parameter difference `b - a` wrapped into `(-π, π]`.
pub fn param_delta(a: f64, b: f64) -> f64 {
    let mut d = (b - a).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

const SAMPLES: usize = 2048;

impl Curve {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(GeometryError::InvalidCurve(format!("circle radius {radius}")));
        }
        Ok(Curve::Circle { center, radius })
    }

    /// Curve from a position map and its first two derivatives.
    pub fn parametric<P, D1, D2>(pos: P, d1: D1, d2: D2) -> Result<Self, GeometryError>
    where
        P: Fn(f64) -> Vec2 + Send + Sync + 'static,
        D1: Fn(f64) -> Vec2 + Send + Sync + 'static,
        D2: Fn(f64) -> Vec2 + Send + Sync + 'static,
    {
        let c = Curve::Parametric(ParametricCurve {
            pos: Arc::new(pos),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        });
        c.validate()?;
        Ok(c)
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0 && b > 0.0) {
            return Err(GeometryError::InvalidCurve(format!("ellipse axes {a}, {b}")));
        }
        Curve::parametric(
            move |s| center + Vec2::new(a * s.cos(), b * s.sin()),
            move |s| Vec2::new(-a * s.sin(), b * s.cos()),
            move |s| Vec2::new(-a * s.cos(), -b * s.sin()),
        )
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let pts: Vec<Vec2> = (0..SAMPLES)
            .map(|i| self.point(TAU * i as f64 / SAMPLES as f64))
            .collect();
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::InvalidCurve("non-finite point".into()));
        }
        for i in 0..SAMPLES {
            let s = TAU * i as f64 / SAMPLES as f64;
            if !(self.speed(s) > 0.0) {
                return Err(GeometryError::InvalidCurve(format!("degenerate speed at s = {s}")));
            }
        }
        if self.enclosed_area() <= 0.0 {
            return Err(GeometryError::InvalidCurve("curve must be counter-clockwise".into()));
        }
        // coarse self-intersection check on the sampled polygon
        let m = 256;
        let q: Vec<Vec2> = (0..m).map(|i| pts[i * SAMPLES / m]).collect();
        for i in 0..m {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_cross(q[i], q[(i + 1) % m], q[j], q[(j + 1) % m]) {
                    return Err(GeometryError::InvalidCurve("curve self-intersects".into()));
                }
            }
        }
        Ok(())
    }

    pub fn as_circle(&self) -> Option<(Vec2, f64)> {
        match self {
            Curve::Circle { center, radius } => Some((*center, *radius)),
            Curve::Parametric(_) => None,
        }
    }

    pub fn point(&self, s: f64) -> Vec2 {
        match self {
            Curve::Circle { center, radius } => *center + Vec2::from_polar(*radius, s),
            Curve::Parametric(p) => (p.pos)(s),
        }
    }

    /// First derivative `y'(s)`.
    pub fn derivative(&self, s: f64) -> Vec2 {
        match self {
            Curve::Circle { radius, .. } => Vec2::new(-radius * s.sin(), radius * s.cos()),
            Curve::Parametric(p) => (p.d1)(s),
        }
    }

    pub fn second_derivative(&self, s: f64) -> Vec2 {
        match self {
            Curve::Circle { radius, .. } => Vec2::new(-radius * s.cos(), -radius * s.sin()),
            Curve::Parametric(p) => (p.d2)(s),
        }
    }

    pub fn speed(&self, s: f64) -> f64 {
        self.derivative(s).norm()
    }

    /// Unit normal pointing out of the enclosed region.
    pub fn normal(&self, s: f64) -> Vec2 {
        self.derivative(s).rot_cw().normalized()
    }

    /// Signed curvature, positive for convex counter-clockwise arcs.
    pub fn curvature(&self, s: f64) -> f64 {
        let d1 = self.derivative(s);
        d1.cross(self.second_derivative(s)) / d1.norm().powi(3)
    }

    pub fn max_curvature(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => 1.0 / radius,
            Curve::Parametric(_) => (0..SAMPLES)
                .map(|i| self.curvature(TAU * i as f64 / SAMPLES as f64).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Arclength; the trapezoid rule is spectrally accurate for periodic integrands.
    pub fn length(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => TAU * radius,
            Curve::Parametric(_) => {
                let h = TAU / SAMPLES as f64;
                (0..SAMPLES).map(|i| self.speed(i as f64 * h)).sum::<f64>() * h
            }
        }
    }

    pub fn enclosed_area(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => PI * radius * radius,
            Curve::Parametric(_) => {
                let h = TAU / SAMPLES as f64;
                0.5 * h
                    * (0..SAMPLES)
                        .map(|i| {
                            let s = i as f64 * h;
                            self.point(s).cross(self.derivative(s))
                        })
                        .sum::<f64>()
            }
        }
    }

    /// Whether `p` lies strictly inside the enclosed region.
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Curve::Circle { center, radius } => p.dist(*center) < *radius,
            Curve::Parametric(_) => {
                let mut winding = 0.0;
                let mut prev = self.point(0.0) - p;
                for i in 1..=SAMPLES {
                    let cur = self.point(TAU * i as f64 / SAMPLES as f64) - p;
                    winding += prev.cross(cur).atan2(prev.dot(cur));
                    prev = cur;
                }
                winding.abs() > PI
            }
        }
    }

    /// Parameter of the closest curve point to `p`.
    pub fn closest_param(&self, p: Vec2) -> f64 {
        match self {
            Curve::Circle { center, .. } => {
                let d = p - *center;
                wrap_param(d.y.atan2(d.x))
            }
            Curve::Parametric(_) => {
                let m = 512;
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..m {
                    let s = TAU * i as f64 / m as f64;
                    let d = self.point(s).dist(p);
                    if d < best.0 {
                        best = (d, s);
                    }
                }
                let mut s = best.1;
                let step = TAU / m as f64;
                for _ in 0..50 {
                    let r = self.point(s) - p;
                    let d1 = self.derivative(s);
                    let f = r.dot(d1);
                    let fp = d1.norm_sq() + r.dot(self.second_derivative(s));
                    if fp <= 0.0 {
                        break;
                    }
                    let ds = (f / fp).clamp(-step, step);
                    s -= ds;
                    if ds.abs() < 1e-15 {
                        break;
                    }
                }
                wrap_param(s)
            }
        }
    }

    /// Unsigned distance from `p` to the curve.
    pub fn distance(&self, p: Vec2) -> f64 {
        match self {
            Curve::Circle { center, radius } => (p.dist(*center) - radius).abs(),
            Curve::Parametric(_) => self.point(self.closest_param(p)).dist(p),
        }
    }

    /// Parameters that split the curve into `m` arcs of equal length.
    pub fn equal_arclength_params(&self, m: usize) -> Vec<f64> {
        match self {
            Curve::Circle { .. } => (0..m).map(|i| TAU * i as f64 / m as f64).collect(),
            Curve::Parametric(_) => {
                let n = SAMPLES * 4;
                let h = TAU / n as f64;
                let mut cum = vec![0.0; n + 1];
                for i in 0..n {
                    let a = self.speed(i as f64 * h);
                    let b = self.speed((i + 1) as f64 * h);
                    cum[i + 1] = cum[i] + 0.5 * h * (a + b);
                }
                let total = cum[n];
                let mut out = Vec::with_capacity(m);
                let mut j = 0;
                for i in 0..m {
                    let target = total * i as f64 / m as f64;
                    while j + 1 < n && cum[j + 1] < target {
                        j += 1;
                    }
                    let frac = if cum[j + 1] > cum[j] {
                        (target - cum[j]) / (cum[j + 1] - cum[j])
                    } else {
                        0.0
                    };
                    out.push((j as f64 + frac) * h);
                }
                out
            }
        }
    }
}

/// Proper crossing test for two closed segments.
pub(crate) fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}
