use std::f64::consts::{PI, TAU};

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;

use super::trig::{nodes, Mode, TrigPolynomial};
use super::BemError;
use crate::geometry::Curve;

/// Single-layer kernel `V(s,t) = -(1/2π) log|y(s) - y(t)|`.
pub fn single_layer_kernel(curve: &Curve, s: f64, t: f64) -> f64 {
    -(curve.point(s).dist(curve.point(t))).ln() / TAU
}

/// Double-layer kernel `K(s,t) = (1/2π) (y(t) - y(s))·n(s) / |y(s) - y(t)|²`,
/// the normal derivative of the fundamental solution at `y(s)` along the
/// outward normal. Its diagonal limit is `-κ(t)/(4π)`.
pub fn double_layer_kernel(curve: &Curve, s: f64, t: f64) -> f64 {
    let d = curve.point(t) - curve.point(s);
    let r2 = d.norm_sq();
    if r2 < 1e-24 {
        return -curve.curvature(t) / (4.0 * PI);
    }
    d.dot(curve.normal(s)) / (TAU * r2)
}

/// How the boundary integral equation is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BemScheme {
    #[default]
    Galerkin,
    /// Pointwise at the `2n` nodes, with `u_∞` as an extra unknown.
    Collocation,
}

/// Discrete layer operators on `𝕋_n` for one curve.
///
/// Galerkin matrices use the arclength inner product `⟨a, b⟩ = ∫ a b |y'| ds`
/// with entries `G[k][j] = ⟨A φ_j, φ_k⟩`; point matrices hold `(A φ_j)(t_i)` at the nodes.
pub struct LayerOperatorSet {
    n: usize,
    curve: Curve,
    length: f64,
    mass: Mat<f64>,
    v: Mat<f64>,
    k: Mat<f64>,
    v_nodes: Mat<f64>,
    k_nodes: Mat<f64>,
    means: Vec<f64>,
    reduced: Mat<f64>,
    reduced_lu: PartialPivLu<f64>,
}

impl std::fmt::Debug for LayerOperatorSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LayerOperatorSet")
            .field("n", &self.n)
            .field("curve", &self.curve)
            .finish()
    }
}

pub fn assemble_layer_operators(curve: &Curve, n: usize) -> Result<LayerOperatorSet, BemError> {
    if n < 2 {
        return Err(BemError::InvalidParameter(format!("degree n = {n}, need n ≥ 2")));
    }
    let dim = 2 * n;
    let (mass, v, k, v_nodes, k_nodes) = match curve.as_circle() {
        Some((_, r)) => circle_matrices(n, r),
        None => quadrature_matrices(curve, n),
    };
    let length = curve.length();
    let means: Vec<f64> = (0..dim).map(|j| mass[(0, j)] / length).collect();
    let basis = reduced_basis(&means);
    let mut op = Mat::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            op[(i, j)] = 0.5 * mass[(i, j)] - k[(i, j)];
        }
    }
    let reduced = basis.transpose() * &op * &basis;
    let reduced_lu = reduced.partial_piv_lu();
    Ok(LayerOperatorSet {
        n,
        curve: curve.clone(),
        length,
        mass,
        v,
        k,
        v_nodes,
        k_nodes,
        means,
        reduced,
        reduced_lu,
    })
}

type Matrices = (Mat<f64>, Mat<f64>, Mat<f64>, Mat<f64>, Mat<f64>);

fn circle_matrices(n: usize, r: f64) -> Matrices {
    let dim = 2 * n;
    let mut mass = Mat::zeros(dim, dim);
    let mut v = Mat::zeros(dim, dim);
    let mut k = Mat::zeros(dim, dim);
    let t = nodes(n);
    let mut v_nodes = Mat::zeros(dim, dim);
    let mut k_nodes = Mat::zeros(dim, dim);
    for j in 0..dim {
        let mode = Mode::of(n, j);
        let (norm, v_eig, k_eig) = match mode.frequency() {
            0 => (TAU * r, -r * r.ln(), -0.5),
            m => (PI * r, r / (2.0 * m as f64), 0.0),
        };
        mass[(j, j)] = norm;
        v[(j, j)] = v_eig * norm;
        k[(j, j)] = k_eig * norm;
        for (i, ti) in t.iter().enumerate() {
            v_nodes[(i, j)] = v_eig * mode.eval(*ti);
            k_nodes[(i, j)] = k_eig * mode.eval(*ti);
        }
    }
    (mass, v, k, v_nodes, k_nodes)
}

/// Log-splitting quadrature on a fine periodic grid.
fn quadrature_matrices(curve: &Curve, n: usize) -> Matrices {
    let dim = 2 * n;
    let ratio = (512usize.div_ceil(dim)).max(16);
    let m = dim * ratio;
    let h = TAU / m as f64;
    let s: Vec<f64> = (0..m).map(|l| l as f64 * h).collect();
    let speed: Vec<f64> = s.iter().map(|&x| curve.speed(x)).collect();
    // smooth remainder of the single layer and the full double layer, kernel[(i, l)] for target i, source l
    let mut v1 = Mat::<f64>::zeros(m, m);
    let mut kk = Mat::<f64>::zeros(m, m);
    for i in 0..m {
        for l in 0..m {
            if i == l {
                v1[(i, l)] = -speed[i].ln() / TAU;
            } else {
                let d = curve.point(s[l]).dist(curve.point(s[i]));
                let base = (2.0 * (0.5 * (s[i] - s[l])).sin()).abs();
                v1[(i, l)] = -(d / base).ln() / TAU;
            }
            kk[(i, l)] = double_layer_kernel(curve, s[l], s[i]);
        }
    }
    let cos_tab = |f: usize, l: usize| ((f * l) % m) as f64 * h;
    let mut v_fine = Mat::<f64>::zeros(m, dim);
    let mut k_fine = Mat::<f64>::zeros(m, dim);
    let mut phi = Mat::<f64>::zeros(m, dim);
    for j in 0..dim {
        let mode = Mode::of(n, j);
        let rho: Vec<f64> = (0..m).map(|l| mode.eval(s[l]) * speed[l]).collect();
        for l in 0..m {
            phi[(l, j)] = mode.eval(s[l]);
        }
        // Fourier coefficients of the density, then the analytic log-kernel eigenvalues 1/(2f)
        let mut sing = vec![0.0; m];
        for f in 1..=m / 2 {
            let (mut a, mut b) = (0.0, 0.0);
            for (l, r) in rho.iter().enumerate() {
                let ang = cos_tab(f, l);
                a += r * ang.cos();
                b += r * ang.sin();
            }
            let scale = if f == m / 2 { 1.0 / m as f64 } else { 2.0 / m as f64 };
            let eig = scale / (2.0 * f as f64);
            let (a, b) = (a * eig, b * eig);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            for (i, si) in sing.iter_mut().enumerate() {
                let ang = cos_tab(f, i);
                *si += a * ang.cos() + b * ang.sin();
            }
        }
        for i in 0..m {
            let mut sv = 0.0;
            let mut sk = 0.0;
            for l in 0..m {
                sv += v1[(i, l)] * rho[l];
                sk += kk[(i, l)] * rho[l];
            }
            v_fine[(i, j)] = h * sv + sing[i];
            k_fine[(i, j)] = h * sk;
        }
    }
    let galerkin = |a: &Mat<f64>| {
        Mat::<f64>::from_fn(dim, dim, |kr, j| (0..m).map(|i| h * a[(i, j)] * phi[(i, kr)] * speed[i]).sum())
    };
    let mass = galerkin(&phi);
    let v = galerkin(&v_fine);
    let k = galerkin(&k_fine);
    let v_nodes = Mat::<f64>::from_fn(dim, dim, |i, j| v_fine[(i * ratio, j)]);
    let k_nodes = Mat::<f64>::from_fn(dim, dim, |i, j| k_fine[(i * ratio, j)]);
    (mass, v, k, v_nodes, k_nodes)
}

/// Columns `e_j - mean_j e_0`, `j = 1, …, 2n-1`: a basis of the mean-zero subspace.
fn reduced_basis(means: &[f64]) -> Mat<f64> {
    let dim = means.len();
    Mat::from_fn(dim, dim - 1, |i, c| {
        if i == c + 1 {
            1.0
        } else if i == 0 {
            -means[c + 1]
        } else {
            0.0
        }
    })
}

fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}

impl LayerOperatorSet {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mass_matrix(&self) -> &Mat<f64> {
        &self.mass
    }

    pub fn single_layer_matrix(&self) -> &Mat<f64> {
        &self.v
    }

    pub fn double_layer_matrix(&self) -> &Mat<f64> {
        &self.k
    }

    /// Weighted means of the basis modes.
    pub fn mode_means(&self) -> &[f64] {
        &self.means
    }

    /// Reduced Galerkin matrix of `½ - 𝒦` on the mean-zero basis.
    pub fn reduced_matrix(&self) -> &Mat<f64> {
        &self.reduced
    }

    /// `(1/|Γ|) ∫ p |y'| ds`.
    pub fn weighted_mean(&self, p: &TrigPolynomial) -> f64 {
        p.resized(self.n).coeffs().iter().zip(&self.means).map(|(c, m)| c * m).sum()
    }

    /// `‖p‖_{L²(Γ)}`.
    pub fn l2_norm(&self, p: &TrigPolynomial) -> f64 {
        let c = p.resized(self.n);
        let mc = matvec(&self.mass, c.coeffs());
        c.coeffs().iter().zip(&mc).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    /// Truncation to degree `n` followed by removal of the weighted mean.
    pub fn project_mean_zero(&self, p: &TrigPolynomial) -> TrigPolynomial {
        let r = p.resized(self.n);
        let mean = self.weighted_mean(&r);
        r.plus_constant(-mean).with_mean_zero(true)
    }

    /// Mean-zero projection of the interpolant of `2n` node samples.
    pub fn project_samples(&self, samples: &[f64]) -> Result<TrigPolynomial, BemError> {
        Ok(self.project_mean_zero(&TrigPolynomial::interpolate(self.n, samples)?))
    }

    fn check_mean_zero(&self, p: &TrigPolynomial) -> Result<(), BemError> {
        let mean = self.weighted_mean(p);
        if mean.abs() > 1e-10 * (1.0 + p.max_abs_coeff()) {
            return Err(BemError::NotMeanZero { mean });
        }
        Ok(())
    }

    /// Galerkin solution `g ∈ 𝕋_n⁰` of `⟨(½ - 𝒦) g, ψ⟩ = -⟨𝒱 λ, ψ⟩` for all mean-zero `ψ`.
    pub fn solve_exterior(&self, lambda: &TrigPolynomial) -> Result<TrigPolynomial, BemError> {
        if lambda.degree() != self.n {
            return Err(BemError::Dimension {
                expected: 2 * self.n,
                got: 2 * lambda.degree(),
            });
        }
        self.check_mean_zero(lambda)?;
        let vl = matvec(&self.v, lambda.coeffs());
        let dim = 2 * self.n;
        let rhs = Mat::<f64>::from_fn(dim - 1, 1, |c, _| {
            -(vl[c + 1] - self.means[c + 1] * vl[0])
        });
        let x = self.reduced_lu.solve(&rhs);
        let resid = &self.reduced * &x - &rhs;
        let rn: f64 = (0..dim - 1).map(|i| resid[(i, 0)].abs()).fold(0.0, f64::max);
        let bn: f64 = (0..dim - 1).map(|i| rhs[(i, 0)].abs()).fold(0.0, f64::max);
        if !(rn <= 1e-10 * (bn + 1e-300) || rn < 1e-14) {
            return Err(BemError::Solver(format!("reduced system residual {rn:.3e}")));
        }
        Ok(self.expand_reduced(|c| x[(c, 0)]))
    }

    fn expand_reduced<F: Fn(usize) -> f64>(&self, x: F) -> TrigPolynomial {
        let dim = 2 * self.n;
        let mut coeffs = vec![0.0; dim];
        for c in 0..dim - 1 {
            coeffs[c + 1] = x(c);
            coeffs[0] -= self.means[c + 1] * x(c);
        }
        TrigPolynomial::from_coeffs(self.n, coeffs)
            .expect("length 2n")
            .with_mean_zero(true)
    }

    /// Pointwise version at the nodes: `((½ - 𝒦) g)(t_i) - u_∞ = -(𝒱λ)(t_i)`,
    /// solved for mean-zero `g` and `u_∞` together.
    pub fn solve_exterior_collocation(&self, lambda: &TrigPolynomial) -> Result<(TrigPolynomial, f64), BemError> {
        self.check_mean_zero(lambda)?;
        let dim = 2 * self.n;
        let t = nodes(self.n);
        let vl = matvec(&self.v_nodes, lambda.coeffs());
        let mut a = Mat::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for c in 0..dim - 1 {
                let j = c + 1;
                let col_j = 0.5 * Mode::of(self.n, j).eval(t[i]) - self.k_nodes[(i, j)];
                let col_0 = 0.5 - self.k_nodes[(i, 0)];
                a[(i, c)] = col_j - self.means[j] * col_0;
            }
            a[(i, dim - 1)] = -1.0;
        }
        let rhs = Mat::<f64>::from_fn(dim, 1, |i, _| -vl[i]);
        let x = a.partial_piv_lu().solve(&rhs);
        Ok((self.expand_reduced(|c| x[(c, 0)]), x[(dim - 1, 0)]))
    }

    /// `u_∞ = (1/|Γ|) (∫ 𝒱λ + ∫ (½ - 𝒦) g)`, integrals against arclength.
    pub fn compute_u_infinity(&self, lambda: &TrigPolynomial, g: &TrigPolynomial) -> f64 {
        let l = lambda.resized(self.n);
        let g = g.resized(self.n);
        let mut acc = 0.0;
        for j in 0..2 * self.n {
            acc += self.v[(0, j)] * l.coeffs()[j] + (0.5 * self.mass[(0, j)] - self.k[(0, j)]) * g.coeffs()[j];
        }
        acc / self.length
    }

    /// Values of `𝒱 p` at the nodes.
    pub fn single_layer_at_nodes(&self, p: &TrigPolynomial) -> Vec<f64> {
        matvec(&self.v_nodes, p.resized(self.n).coeffs())
    }

    /// Values of `𝒦 p` at the nodes.
    pub fn double_layer_at_nodes(&self, p: &TrigPolynomial) -> Vec<f64> {
        matvec(&self.k_nodes, p.resized(self.n).coeffs())
    }

    /// Reduced-space coordinates of a mean-zero polynomial.
    pub fn to_reduced(&self, p: &TrigPolynomial) -> Vec<f64> {
        p.resized(self.n).coeffs()[1..].to_vec()
    }

    /// Mean-zero polynomial from reduced coordinates.
    pub fn from_reduced_coords(&self, x: &[f64]) -> TrigPolynomial {
        self.expand_reduced(|c| x[c])
    }
}
