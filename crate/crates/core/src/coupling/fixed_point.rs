use super::CouplingError;
use crate::bem::{nodes, LayerOperatorSet, TrigPolynomial};
use crate::geometry::{BoundaryTag, MappedPoint};
use crate::hdg::{DgField, HdgSystem, Source};

/// Source term and obstacle data of an exterior diffusion problem.
#[derive(Clone, Copy)]
pub struct ProblemData<'a> {
    pub f: Source<'a>,
    /// Dirichlet data on `Γ₀`, evaluated at the image point of a boundary node.
    pub u0: &'a (dyn Fn(&MappedPoint) -> f64 + Sync),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingConfig {
    /// Relaxation parameter in `(0, 1]`.
    pub omega: f64,
    pub max_iterations: usize,
    /// Relative tolerance on the `L²(Γ)` norm of successive traces.
    pub tolerance: f64,
    /// Degree of the trigonometric spaces.
    pub n: usize,
    /// Aitken-type adaptation of `ω` between iterations.
    pub aitken: bool,
    /// Initial mean-zero trace; zero when absent.
    pub initial: Option<TrigPolynomial>,
    pub initial_constant: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            omega: 0.5,
            max_iterations: 200,
            tolerance: 1e-8,
            n: 32,
            aitken: false,
            initial: None,
            initial_constant: 0.0,
        }
    }
}

impl CouplingConfig {
    pub fn validate(&self) -> Result<(), CouplingError> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(CouplingError::Config {
                key: "coupling.omega",
                msg: format!("{} is outside (0, 1]", self.omega),
            });
        }
        if !(self.tolerance > 0.0) {
            return Err(CouplingError::Config {
                key: "coupling.tol",
                msg: format!("{} must be positive", self.tolerance),
            });
        }
        if self.max_iterations == 0 {
            return Err(CouplingError::Config {
                key: "coupling.max_iter",
                msg: "must be at least 1".into(),
            });
        }
        if self.n < 2 {
            return Err(CouplingError::Config {
                key: "coupling.n",
                msg: format!("{} is below 2", self.n),
            });
        }
        Ok(())
    }
}

/// Result of one interior solve.
#[derive(Debug, Clone)]
pub struct DtnResult {
    /// `λ = -P(E q_h · n)`, mean-zero.
    pub lambda: TrigPolynomial,
    /// Weighted mean of the interpolated flux `E q_h · n` on `Γ`.
    pub mean_flux: f64,
    pub field: DgField,
}

#[derive(Debug, Clone)]
pub struct NtdResult {
    pub g: TrigPolynomial,
    pub u_inf: f64,
}

/// Interior system and boundary operators of one discretization, ready for coupling.
pub struct Coupler<'a> {
    pub system: &'a HdgSystem,
    pub ops: &'a LayerOperatorSet,
    params: Vec<f64>,
    /// Mean flux through `Γ` caused by a unit constant trace with zero source and obstacle data.
    unit_mean_flux: f64,
}

/// Converged (or final) state of the iteration.
#[derive(Debug, Clone)]
pub struct CouplingState {
    pub iterations: usize,
    /// Mean-zero part of the Dirichlet trace on `Γ`.
    pub g: TrigPolynomial,
    /// Constant part of the Dirichlet trace on `Γ`.
    pub constant: f64,
    pub lambda: TrigPolynomial,
    pub u_inf: f64,
    /// `‖(g+c)ᵏ - (g+c)ᵏ⁻¹‖_{L²(Γ)}` per iteration.
    pub history: Vec<f64>,
    /// `|mean(λ)| / ‖λ‖` per iteration.
    pub lambda_mean: Vec<f64>,
    /// Relative residual of the interior trace solve per iteration.
    pub interior_residual: Vec<f64>,
    pub u_inf_history: Vec<f64>,
    pub omegas: Vec<f64>,
    pub field: DgField,
    pub converged: bool,
}

impl CouplingState {
    /// Full Dirichlet trace `g + c`.
    pub fn trace(&self) -> TrigPolynomial {
        self.g.plus_constant(self.constant)
    }

    /// `iter,update_norm,u_inf,interior_residual` rows.
    pub fn log_csv(&self) -> String {
        let mut s = String::from("iter,update_norm,u_inf,interior_residual\n");
        for i in 0..self.history.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                self.history[i],
                self.u_inf_history[i],
                self.interior_residual[i]
            ));
        }
        s
    }
}

/// `(1 - ω) g_old + ω g̃`.
pub fn relax_update(g_old: &TrigPolynomial, g_tilde: &TrigPolynomial, omega: f64) -> Result<TrigPolynomial, CouplingError> {
    if g_old.degree() != g_tilde.degree() {
        return Err(CouplingError::Dimension(g_old.degree(), g_tilde.degree()));
    }
    Ok(g_old.relax(g_tilde, omega))
}

/// Geometric-mean ratio of successive update norms over the tail half of the history.
pub fn estimate_contraction(history: &[f64]) -> Result<f64, CouplingError> {
    if history.len() < 3 {
        return Err(CouplingError::ShortHistory(history.len()));
    }
    let tail: Vec<f64> = history[history.len() / 2..].iter().copied().filter(|v| *v > 0.0).collect();
    if tail.len() < 2 {
        return Ok(0.0);
    }
    let steps = (tail.len() - 1) as f64;
    Ok((tail[tail.len() - 1] / tail[0]).powf(1.0 / steps))
}

impl<'a> Coupler<'a> {
    pub fn new(system: &'a HdgSystem, ops: &'a LayerOperatorSet) -> Result<Self, CouplingError> {
        let mut c = Coupler {
            system,
            ops,
            params: nodes(ops.degree()),
            unit_mean_flux: 0.0,
        };
        let zero = |_: crate::Vec2| 0.0;
        let unit = c.flux_samples(&zero, &|tag, _| if tag == BoundaryTag::Gamma { 1.0 } else { 0.0 })?;
        c.unit_mean_flux = c.ops.weighted_mean(&TrigPolynomial::interpolate(ops.degree(), &unit.0)?);
        if !(c.unit_mean_flux.abs() > 0.0) {
            return Err(CouplingError::Oracle("constant trace produces no flux through Γ".into()));
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.ops.degree()
    }

    pub fn unit_mean_flux(&self) -> f64 {
        self.unit_mean_flux
    }

    fn flux_samples(
        &self,
        f: Source<'_>,
        data: &(dyn Fn(BoundaryTag, &MappedPoint) -> f64 + Sync),
    ) -> Result<(Vec<f64>, DgField), CouplingError> {
        let field = self.system.solve(f, data)?;
        let s = self.system.extrapolate_flux(&field, self.ops.curve(), &self.params)?;
        Ok((s, field))
    }

    /// Interior solve with trace `g + c` on `Γ`, followed by the flux projection.
    pub fn dtn_step(&self, g: &TrigPolynomial, c: f64, data: &ProblemData<'_>) -> Result<DtnResult, CouplingError> {
        let trace = |tag: BoundaryTag, p: &MappedPoint| match tag {
            BoundaryTag::Gamma => g.eval(p.s) + c,
            BoundaryTag::Gamma0 => (data.u0)(p),
        };
        let (samples, field) = self.flux_samples(data.f, &trace)?;
        let p = TrigPolynomial::interpolate(self.degree(), &samples)?;
        let mean_flux = self.ops.weighted_mean(&p);
        let lambda = self.ops.project_mean_zero(&p).scale(-1.0);
        Ok(DtnResult { lambda, mean_flux, field })
    }

    /// Exterior solve for the mean-zero trace; `c` enters only `u_∞`.
    pub fn ntd_step(&self, lambda: &TrigPolynomial, c: f64) -> Result<NtdResult, CouplingError> {
        let g = self.ops.solve_exterior(lambda)?;
        let u_inf = self.ops.compute_u_infinity(lambda, &g.plus_constant(c));
        Ok(NtdResult { g, u_inf })
    }

    /// Constant that zeroes the mean flux, given the response at the current constant.
    pub fn balanced_constant(&self, c: f64, mean_flux: f64) -> f64 {
        c - mean_flux / self.unit_mean_flux
    }

    pub fn run_fixed_point(&self, data: &ProblemData<'_>, cfg: &CouplingConfig) -> Result<CouplingState, CouplingError> {
        cfg.validate()?;
        if cfg.n != self.degree() {
            return Err(CouplingError::Dimension(cfg.n, self.degree()));
        }
        let n = self.degree();
        let mut g = match &cfg.initial {
            Some(p) => self.ops.project_mean_zero(p),
            None => TrigPolynomial::zero(n),
        };
        let mut c = cfg.initial_constant;
        let mut omega = cfg.omega;
        let mut st = CouplingState {
            iterations: 0,
            g: g.clone(),
            constant: c,
            lambda: TrigPolynomial::zero(n),
            u_inf: 0.0,
            history: Vec::new(),
            lambda_mean: Vec::new(),
            interior_residual: Vec::new(),
            u_inf_history: Vec::new(),
            omegas: Vec::new(),
            field: DgField::zeros(self.system.degree(), 0, 0),
            converged: false,
        };
        let mut prev_res: Option<Vec<f64>> = None;
        for it in 1..=cfg.max_iterations {
            let dtn = self.dtn_step(&g, c, data)?;
            let c_tilde = self.balanced_constant(c, dtn.mean_flux);
            let ntd = self.ntd_step(&dtn.lambda, c_tilde)?;
            // residual of the fixed-point map, used by the adaptive relaxation
            let res: Vec<f64> = ntd
                .g
                .coeffs()
                .iter()
                .zip(g.coeffs())
                .map(|(a, b)| a - b)
                .chain(std::iter::once(c_tilde - c))
                .collect();
            if cfg.aitken {
                if let Some(pr) = &prev_res {
                    let d: Vec<f64> = res.iter().zip(pr).map(|(a, b)| a - b).collect();
                    let dd: f64 = d.iter().map(|v| v * v).sum();
                    if dd > 0.0 {
                        let num: f64 = pr.iter().zip(&d).map(|(a, b)| a * b).sum();
                        omega = (-omega * num / dd).clamp(0.05, 1.0);
                    }
                }
                prev_res = Some(res);
            }
            let g_new = relax_update(&g, &ntd.g, omega)?;
            let c_new = (1.0 - omega) * c + omega * c_tilde;
            let diff = self.ops.l2_norm(&g_new.plus_constant(c_new).sub(&g.plus_constant(c)));
            let size = self.ops.l2_norm(&g_new.plus_constant(c_new));
            let lam_norm = self.ops.l2_norm(&dtn.lambda);
            st.lambda_mean.push(if lam_norm > 0.0 {
                self.ops.weighted_mean(&dtn.lambda).abs() / lam_norm
            } else {
                0.0
            });
            st.history.push(diff);
            st.interior_residual.push(dtn.field.residual);
            st.u_inf_history.push(ntd.u_inf);
            st.omegas.push(omega);
            st.iterations = it;
            st.lambda = dtn.lambda;
            st.u_inf = ntd.u_inf;
            st.field = dtn.field;
            g = g_new;
            c = c_new;
            st.g = g.clone();
            st.constant = c;
            if !diff.is_finite() {
                break;
            }
            if diff <= cfg.tolerance * size.max(1.0) {
                st.converged = true;
                return Ok(st);
            }
        }
        Err(CouplingError::NotConverged { history: st.history })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_of_geometric_sequence() {
        assert!((estimate_contraction(&[1.0, 0.5, 0.25, 0.125]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(estimate_contraction(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(estimate_contraction(&[1.0, 0.5]), Err(CouplingError::ShortHistory(2))));
    }

    #[test]
    fn relaxation_examples() {
        let n = 4;
        let z = TrigPolynomial::zero(n);
        let c = TrigPolynomial::from_modes(n, |m| if m == crate::bem::Mode::Cos(1) { 1.0 } else { 0.0 });
        assert_eq!(relax_update(&z, &c, 1.0).unwrap().coeffs(), c.coeffs());
        assert_eq!(relax_update(&z, &c, 0.0).unwrap().coeffs(), z.coeffs());
        assert_eq!(relax_update(&z, &c, 0.5).unwrap().coeffs(), c.scale(0.5).coeffs());
        assert!(relax_update(&z, &TrigPolynomial::zero(5), 0.5).is_err());
    }

    #[test]
    fn config_errors_name_the_key() {
        let cfg = CouplingConfig {
            omega: 0.0,
            ..CouplingConfig::default()
        };
        match cfg.validate() {
            Err(CouplingError::Config { key, .. }) => assert_eq!(key, "coupling.omega"),
            other => panic!("{other:?}"),
        }
    }
}
