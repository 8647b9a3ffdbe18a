use std::f64::consts::PI;

use super::BemError;

/// Trigonometric polynomial of degree `n` on `[0, 2π)`:
/// `a₀ + Σ_{m=1}^{n} a_m cos(mt) + Σ_{m=1}^{n-1} b_m sin(mt)`.
///
/// Coefficients are stored as `[a₀, a₁, …, a_n, b₁, …, b_{n-1}]` (length `2n`),
/// the space spanned by the Lagrange basis on the nodes `t_j = jπ/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    n: usize,
    coeffs: Vec<f64>,
    mean_zero: bool,
}

/// Basis function behind coefficient slot `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cos(usize),
    Sin(usize),
}

impl Mode {
    pub fn of(n: usize, j: usize) -> Mode {
        if j <= n {
            Mode::Cos(j)
        } else {
            Mode::Sin(j - n)
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Mode::Cos(0) => 1.0,
            Mode::Cos(m) => (m as f64 * t).cos(),
            Mode::Sin(m) => (m as f64 * t).sin(),
        }
    }

    pub fn frequency(self) -> usize {
        match self {
            Mode::Cos(m) | Mode::Sin(m) => m,
        }
    }
}

/// Interpolation nodes `t_j = jπ/n`, `j = 0, …, 2n-1`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..2 * n).map(|j| j as f64 * PI / n as f64).collect()
}

impl TrigPolynomial {
    pub fn zero(n: usize) -> Self {
        TrigPolynomial {
            n,
            coeffs: vec![0.0; 2 * n],
            mean_zero: true,
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self, BemError> {
        if coeffs.len() != 2 * n {
            return Err(BemError::Dimension {
                expected: 2 * n,
                got: coeffs.len(),
            });
        }
        Ok(TrigPolynomial {
            n,
            coeffs,
            mean_zero: false,
        })
    }

    /// Builds from a closure over modes, e.g. `|m| if m == Mode::Cos(1) { 1.0 } else { 0.0 }`.
    pub fn from_modes<F: Fn(Mode) -> f64>(n: usize, f: F) -> Self {
        TrigPolynomial {
            n,
            coeffs: (0..2 * n).map(|j| f(Mode::of(n, j))).collect(),
            mean_zero: false,
        }
    }

    /// Interpolant of values at the `2n` nodes.
    pub fn interpolate(n: usize, values: &[f64]) -> Result<Self, BemError> {
        if values.len() != 2 * n {
            return Err(BemError::Dimension {
                expected: 2 * n,
                got: values.len(),
            });
        }
        let t = nodes(n);
        let nn = n as f64;
        let coeffs = (0..2 * n)
            .map(|j| {
                let mode = Mode::of(n, j);
                let s: f64 = values.iter().zip(&t).map(|(v, tt)| v * mode.eval(*tt)).sum();
                match mode {
                    Mode::Cos(0) => s / (2.0 * nn),
                    Mode::Cos(m) if m == n => s / (2.0 * nn),
                    _ => s / nn,
                }
            })
            .collect();
        Ok(TrigPolynomial {
            n,
            coeffs,
            mean_zero: false,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub(crate) fn with_mean_zero(mut self, flag: bool) -> Self {
        self.mean_zero = flag;
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if *c == 0.0 { 0.0 } else { c * Mode::of(self.n, j).eval(t) })
            .sum()
    }

    pub fn values_at_nodes(&self) -> Vec<f64> {
        nodes(self.n).into_iter().map(|t| self.eval(t)).collect()
    }

    /// `(m, a_m, b_m)` for `m = 0, …, n`.
    pub fn cos_sin_pairs(&self) -> Vec<(usize, f64, f64)> {
        (0..=self.n)
            .map(|m| {
                let b = if m >= 1 && m < self.n { self.coeffs[self.n + m] } else { 0.0 };
                (m, self.coeffs[m], b)
            })
            .collect()
    }

    /// Coefficients of the same function in degree `n` (truncating or zero-padding).
    pub fn resized(&self, n: usize) -> TrigPolynomial {
        TrigPolynomial::from_modes(n, |mode| match mode {
            Mode::Cos(m) if m <= self.n => self.coeffs[m],
            Mode::Sin(m) if m < self.n => self.coeffs[self.n + m],
            _ => 0.0,
        })
    }

    /// `(1 - ω) self + ω other`.
    pub fn relax(&self, other: &TrigPolynomial, omega: f64) -> TrigPolynomial {
        debug_assert_eq!(self.n, other.n);
        TrigPolynomial {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (1.0 - omega) * a + omega * b)
                .collect(),
            mean_zero: self.mean_zero && other.mean_zero,
        }
    }

    pub fn add(&self, other: &TrigPolynomial) -> TrigPolynomial {
        self.relax(other, 0.5).scale(2.0)
    }

    pub fn sub(&self, other: &TrigPolynomial) -> TrigPolynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> TrigPolynomial {
        TrigPolynomial {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            mean_zero: self.mean_zero,
        }
    }

    pub fn plus_constant(&self, c: f64) -> TrigPolynomial {
        let mut p = self.clone();
        p.coeffs[0] += c;
        p.mean_zero = false;
        p
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// CSV with one row per frequency: `mode,cos,sin`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,cos,sin\n");
        for (m, a, b) in self.cos_sin_pairs() {
            s.push_str(&format!("{m},{a},{b}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interpolation_reproduces_modes() {
        let n = 6;
        for j in 0..2 * n {
            let mode = Mode::of(n, j);
            let v: Vec<f64> = nodes(n).iter().map(|&t| mode.eval(t)).collect();
            let p = TrigPolynomial::interpolate(n, &v).unwrap();
            for (i, c) in p.coeffs().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c - want).abs() < 1e-13, "mode {mode:?} slot {i}");
            }
        }
    }

    #[test]
    fn wrong_sample_count_is_rejected() {
        assert!(matches!(
            TrigPolynomial::interpolate(4, &[0.0; 7]),
            Err(BemError::Dimension { expected: 8, got: 7 })
        ));
    }

    proptest! {
        #[test]
        fn interpolation_roundtrip(c in proptest::collection::vec(-5.0f64..5.0, 10)) {
            let p = TrigPolynomial::from_coeffs(5, c).unwrap();
            let q = TrigPolynomial::interpolate(5, &p.values_at_nodes()).unwrap();
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn relax_is_affine(c in proptest::collection::vec(-5.0f64..5.0, 8), w in 0.0f64..1.0) {
            let p = TrigPolynomial::from_coeffs(4, c.clone()).unwrap();
            let q = p.scale(-2.0);
            let r = p.relax(&q, w);
            for (i, v) in r.coeffs().iter().enumerate() {
                prop_assert!((v - (1.0 - 3.0 * w) * c[i]).abs() < 1e-12);
            }
        }
    }
}
