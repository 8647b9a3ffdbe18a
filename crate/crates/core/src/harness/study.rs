use std::f64::consts::PI;
use std::time::Instant;

use super::{HarnessError, ManufacturedCase};
use crate::bem::{assemble_layer_operators, LayerOperatorSet, TrigPolynomial};
use crate::coupling::{estimate_contraction, Coupler, CouplingConfig, CouplingError, CouplingState, ProblemData};
use crate::geometry::{
    build_annulus_mesh, build_boundary_map, BoundaryMap, BoundaryTag, MapStrategy, MappedPoint, UnfittedMesh,
};
use crate::hdg::{DgField, HdgSystem, SystemOptions};

/// Discretization settings shared by all levels of a study.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub k: usize,
    pub tau: f64,
    pub strategy: MapStrategy,
    pub regularity_bound: f64,
    pub parallel: bool,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            k: 1,
            tau: 1.0,
            strategy: MapStrategy::Radial,
            regularity_bound: 12.0,
            parallel: true,
        }
    }
}

/// One mesh with its interior system and boundary operators.
pub struct Level {
    pub h: f64,
    pub mesh: UnfittedMesh,
    pub bmap: BoundaryMap,
    pub system: HdgSystem,
    pub ops: Option<LayerOperatorSet>,
    pub r_h: f64,
}

impl Level {
    pub fn build(case: &ManufacturedCase, h: f64, n: usize, disc: &Discretization) -> Result<Level, HarnessError> {
        let mesh = build_annulus_mesh(&case.gamma, &case.gamma0, h, disc.regularity_bound)?;
        let bmap = build_boundary_map(&mesh, &case.gamma, &case.gamma0, disc.strategy)?;
        let opts = SystemOptions {
            tau: disc.tau,
            parallel: disc.parallel,
            ..SystemOptions::default()
        };
        let system = HdgSystem::build(&mesh, &bmap, &case.kappa, disc.k, &opts)?;
        let ops = if case.has_exterior() {
            Some(assemble_layer_operators(&case.gamma, n)?)
        } else {
            None
        };
        let r_h = mesh.proximity(&case.gamma, &case.gamma0).r_h;
        Ok(Level {
            h,
            mesh,
            bmap,
            system,
            ops,
            r_h,
        })
    }
}

/// Result of solving one case on one level.
#[derive(Debug, Clone)]
pub struct LevelSolution {
    pub field: DgField,
    /// Coupled run; absent for interior-only cases.
    pub coupling: Option<CouplingState>,
}

/// Solves `case` on `level`: the coupled iteration when the case has an
/// exterior, otherwise the interior problem with exact data on both curves.
pub fn solve_level(case: &ManufacturedCase, level: &Level, cfg: &CouplingConfig) -> Result<LevelSolution, HarnessError> {
    let u = case.u.clone();
    let f = case.f.clone();
    let src = move |x: crate::Vec2| f(x);
    match &level.ops {
        None => {
            let data = move |_: BoundaryTag, p: &MappedPoint| u(p.xbar);
            let field = level.system.solve(&src, &data)?;
            Ok(LevelSolution { field, coupling: None })
        }
        Some(ops) => {
            let coupler = Coupler::new(&level.system, ops)?;
            let u0 = move |p: &MappedPoint| u(p.xbar);
            let data = ProblemData { f: &src, u0: &u0 };
            let st = coupler.run_fixed_point(&data, cfg)?;
            Ok(LevelSolution {
                field: st.field.clone(),
                coupling: Some(st),
            })
        }
    }
}

/// `‖p - g_exact‖_{L²(Γ)}` by a fine trapezoid rule.
pub fn interface_error(case: &ManufacturedCase, p: &TrigPolynomial) -> f64 {
    let m = 1024;
    let mut acc = 0.0;
    for j in 0..m {
        let t = 2.0 * PI * j as f64 / m as f64;
        acc += (p.eval(t) - case.g_exact(t)).powi(2) * case.gamma.speed(t);
    }
    (acc * 2.0 * PI / m as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub level: usize,
    pub h: f64,
    pub r_h: f64,
    pub n: usize,
    pub elements: usize,
    pub dofs: usize,
    pub err_q: f64,
    pub err_u: f64,
    pub err_g: f64,
    pub err_uinf: f64,
    pub u_inf: f64,
    pub iterations: usize,
    pub ratio: f64,
    pub seconds: f64,
    /// Failure message when the level did not produce a solution.
    pub failure: Option<String>,
}

impl StudyRow {
    fn failed(level: usize, h: f64, n: usize, msg: String) -> StudyRow {
        StudyRow {
            level,
            h,
            r_h: f64::NAN,
            n,
            elements: 0,
            dofs: 0,
            err_q: f64::NAN,
            err_u: f64::NAN,
            err_g: f64::NAN,
            err_uinf: f64::NAN,
            u_inf: f64::NAN,
            iterations: 0,
            ratio: f64::NAN,
            seconds: 0.0,
            failure: Some(msg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub case: String,
    pub k: usize,
    pub rows: Vec<StudyRow>,
}

/// `log₂(e_i / e_{i+1})`, or `None` when either error is missing or zero-level.
pub fn rate(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    if e0.is_finite() && e1.is_finite() && e0 > 1e-13 && e1 > 1e-13 {
        Some((e0 / e1).ln() / (h0 / h1).ln())
    } else {
        None
    }
}

impl StudyReport {
    /// Rates between row `i-1` and row `i` for `(q, u)`.
    pub fn rates(&self, i: usize) -> (Option<f64>, Option<f64>) {
        if i == 0 || i >= self.rows.len() {
            return (None, None);
        }
        let (a, b) = (&self.rows[i - 1], &self.rows[i]);
        (rate(a.err_q, b.err_q, a.h, b.h), rate(a.err_u, b.err_u, a.h, b.h))
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "level,h,R_h,err_q,err_u,rate_q,rate_u,iters,ratio,n,elements,dofs,err_g,err_uinf,u_inf,status\n",
        );
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for (i, r) in self.rows.iter().enumerate() {
            let (rq, ru) = self.rates(i);
            s.push_str(&format!(
                "{},{},{:.6e},{:.6e},{:.6e},{},{},{},{:.6},{},{},{},{:.6e},{:.6e},{:.12},{}\n",
                r.level,
                r.h,
                r.r_h,
                r.err_q,
                r.err_u,
                opt(rq),
                opt(ru),
                r.iterations,
                r.ratio,
                r.n,
                r.elements,
                r.dofs,
                r.err_g,
                r.err_uinf,
                r.u_inf,
                if r.failure.is_some() { "failed" } else { "ok" }
            ));
        }
        s
    }

    /// Fixed-width summary for the terminal.
    pub fn table(&self) -> String {
        let mut s = format!("case {}  k = {}\n", self.case, self.k);
        s.push_str(&format!(
            "{:>5} {:>8} {:>9} {:>11} {:>11} {:>6} {:>6} {:>6} {:>7} {:>11} {:>8}\n",
            "level", "h", "R_h", "err_q", "err_u", "r_q", "r_u", "iters", "ratio", "|u_inf-c|", "time[s]"
        ));
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(msg) = &r.failure {
                s.push_str(&format!("{:>5} {:>8} failed: {msg}\n", r.level, r.h));
                continue;
            }
            let (rq, ru) = self.rates(i);
            s.push_str(&format!(
                "{:>5} {:>8} {:>9.2e} {:>11.3e} {:>11.3e} {:>6} {:>6} {:>6} {:>7.3} {:>11.3e} {:>8.2}\n",
                r.level,
                r.h,
                r.r_h,
                r.err_q,
                r.err_u,
                opt(rq),
                opt(ru),
                r.iterations,
                r.ratio,
                r.err_uinf,
                r.seconds
            ));
        }
        s
    }
}

fn run_level(
    case: &ManufacturedCase,
    idx: usize,
    h: f64,
    n: usize,
    disc: &Discretization,
    cfg: &CouplingConfig,
) -> Result<StudyRow, HarnessError> {
    let start = Instant::now();
    let level = Level::build(case, h, n, disc)?;
    let sol = solve_level(case, &level, cfg)?;
    let (err_q, err_u) = level.system.l2_errors(&sol.field, |x| (case.u)(x), |x| (case.q)(x));
    let (err_g, err_uinf, u_inf, iterations, ratio) = match &sol.coupling {
        Some(st) => {
            let exact = case.u_inf.unwrap_or(0.0);
            (
                interface_error(case, &st.trace()),
                (st.u_inf - exact).abs(),
                st.u_inf,
                st.iterations,
                estimate_contraction(&st.history).unwrap_or(f64::NAN),
            )
        }
        None => (f64::NAN, f64::NAN, f64::NAN, 0, f64::NAN),
    };
    Ok(StudyRow {
        level: idx,
        h,
        r_h: level.r_h,
        n,
        elements: level.mesh.num_elements(),
        dofs: level.system.num_unknowns(),
        err_q,
        err_u,
        err_g,
        err_uinf,
        u_inf,
        iterations,
        ratio,
        seconds: start.elapsed().as_secs_f64(),
        failure: None,
    })
}

/// Runs `case` on each mesh size in `hs` (decreasing). Failed levels are
/// recorded in the report and do not stop the others.
pub fn convergence_study(
    case: &ManufacturedCase,
    hs: &[f64],
    n: usize,
    disc: &Discretization,
    cfg: &CouplingConfig,
) -> Result<StudyReport, HarnessError> {
    if hs.len() < 3 {
        return Err(HarnessError::Config {
            key: "discretization.levels".into(),
            msg: format!("a study needs at least 3 levels, got {}", hs.len()),
        });
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(HarnessError::Config {
            key: "discretization.h0".into(),
            msg: "mesh sizes must decrease".into(),
        });
    }
    let cfg = CouplingConfig { n, ..cfg.clone() };
    let rows = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| run_level(case, i, h, n, disc, &cfg).unwrap_or_else(|e| StudyRow::failed(i, h, n, e.to_string())))
        .collect();
    Ok(StudyReport {
        case: case.id.name().to_string(),
        k: disc.k,
        rows,
    })
}

/// `h₀ 2^{-i}` for `i < levels`.
pub fn halving_sequence(h0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|i| h0 / f64::powi(2.0, i as i32)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub converged: bool,
    pub iterations: usize,
    pub ratio: f64,
    pub last_update: f64,
}

/// Behavior of the relaxed iteration over a grid of `ω` on one level.
/// Divergence is recorded, never returned as an error.
pub fn omega_sweep(
    case: &ManufacturedCase,
    level: &Level,
    grid: &[f64],
    cfg: &CouplingConfig,
) -> Result<Vec<SweepRow>, HarnessError> {
    let ops = level.ops.as_ref().ok_or_else(|| HarnessError::Config {
        key: "geometry.case".into(),
        msg: format!("{} has no exterior problem to couple", case.id),
    })?;
    if let Some(w) = grid.iter().find(|w| !(**w > 0.0 && **w <= 1.0)) {
        return Err(HarnessError::Config {
            key: "coupling.omega_grid".into(),
            msg: format!("{w} is outside (0, 1]"),
        });
    }
    let coupler = Coupler::new(&level.system, ops)?;
    let u = case.u.clone();
    let f = case.f.clone();
    let src = move |x: crate::Vec2| f(x);
    let u0 = move |p: &MappedPoint| u(p.xbar);
    let data = ProblemData { f: &src, u0: &u0 };
    grid.iter()
        .map(|&omega| {
            let c = CouplingConfig {
                omega,
                n: ops.degree(),
                ..cfg.clone()
            };
            let (converged, history) = match coupler.run_fixed_point(&data, &c) {
                Ok(st) => (true, st.history),
                Err(CouplingError::NotConverged { history }) => (false, history),
                Err(e) => return Err(e.into()),
            };
            Ok(SweepRow {
                omega,
                converged,
                iterations: history.len(),
                ratio: estimate_contraction(&history).unwrap_or(f64::NAN),
                last_update: history.last().copied().unwrap_or(f64::NAN),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("omega,converged,iterations,ratio,last_update\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{:.6},{:.6e}\n",
            r.omega, r.converged, r.iterations, r.ratio, r.last_update
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_of_exact_halving() {
        assert!((rate(4.0, 1.0, 0.2, 0.1).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(rate(1e-15, 1e-15, 0.2, 0.1), None);
        assert_eq!(halving_sequence(0.2, 3), vec![0.2, 0.1, 0.05]);
    }
}
