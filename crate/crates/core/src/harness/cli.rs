use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::{
    convergence_study, halving_sequence, manufactured_case, omega_sweep, solve_level, sweep_csv, HarnessError, Level,
    RunConfig,
};
use crate::coupling::{monolithic_solve, Coupler, ProblemData};
use crate::geometry::{write_mesh, MappedPoint};
use crate::hdg::coefficients_csv;

#[derive(Debug, Parser)]
#[command(name = "hdgbem", version, about = "Unfitted HDG / spectral BEM solver for exterior diffusion problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the mesh at the coarsest size and report its proximity to the curves.
    Mesh { config: PathBuf },
    /// Solve the configured case on the coarsest mesh.
    Solve { config: PathBuf },
    /// Convergence study over halved mesh sizes.
    Study { config: PathBuf },
    /// Relaxation-parameter sweep on the coarsest mesh.
    Sweep { config: PathBuf },
}

type Action = fn(&RunConfig) -> Result<bool, HarnessError>;

/// Runs the driver on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (path, action): (&Path, Action) = match &cli.command {
        Command::Mesh { config } => (config, mesh_cmd),
        Command::Solve { config } => (config, solve_cmd),
        Command::Study { config } => (config, study_cmd),
        Command::Sweep { config } => (config, sweep_cmd),
    };
    let result = RunConfig::load(path).and_then(|cfg| {
        fs::create_dir_all(&cfg.output_dir)?;
        action(&cfg)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write(cfg: &RunConfig, name: &str, text: &str) -> Result<(), HarnessError> {
    fs::write(cfg.output_dir.join(name), text)?;
    Ok(())
}

fn mesh_cmd(cfg: &RunConfig) -> Result<bool, HarnessError> {
    let case = manufactured_case(cfg.case, cfg.params)?;
    let level = Level::build(&case, cfg.h0, cfg.coupling.n, &cfg.disc)?;
    write_mesh(&level.mesh, &cfg.output_dir.join("mesh.txt"))?;
    let prox = level.mesh.proximity(&case.gamma, &case.gamma0);
    let dev = level.bmap.max_normal_deviation();
    write(
        cfg,
        "mesh_report.csv",
        &format!(
            "h,elements,vertices,R_h,max_distance,normal_deviation,max_transfer_length\n{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}\n",
            cfg.h0,
            level.mesh.num_elements(),
            level.mesh.vertices.len(),
            prox.r_h,
            prox.max_distance,
            dev,
            level.bmap.max_transfer_length()
        ),
    )?;
    println!("mesh h = {}: {} elements, {} vertices", cfg.h0, level.mesh.num_elements(), level.mesh.vertices.len());
    println!("R_h = {:.3e}, max distance = {:.3e}, max |n_h - n| = {:.3e}", prox.r_h, prox.max_distance, dev);
    Ok(true)
}

fn solve_cmd(cfg: &RunConfig) -> Result<bool, HarnessError> {
    let case = manufactured_case(cfg.case, cfg.params)?;
    let level = Level::build(&case, cfg.h0, cfg.coupling.n, &cfg.disc)?;
    let sol = match solve_level(&case, &level, &cfg.coupling) {
        Ok(s) => s,
        Err(HarnessError::Coupling(crate::coupling::CouplingError::NotConverged { history })) => {
            let mut log = String::from("iter,update_norm\n");
            for (i, v) in history.iter().enumerate() {
                log.push_str(&format!("{},{}\n", i + 1, v));
            }
            write(cfg, "iterations.csv", &log)?;
            eprintln!(
                "error: no convergence in {} iterations (last update {:.3e})",
                history.len(),
                history.last().copied().unwrap_or(f64::NAN)
            );
            return Ok(false);
        }
        Err(e) => return Err(e),
    };
    let (eq, eu) = level.system.l2_errors(&sol.field, |x| (case.u)(x), |x| (case.q)(x));
    let f = case.f.clone();
    let cons = level
        .system
        .local_conservation_residuals(&sol.field, &move |x| f(x))
        .into_iter()
        .fold(0.0, |a: f64, b| a.max(b.abs()));
    write(cfg, "field.vtk", &level.system.to_vtk(&sol.field))?;
    write(cfg, "coefficients.csv", &coefficients_csv(&sol.field))?;
    println!("case {}  k = {}  h = {}  elements = {}", case.id, cfg.disc.k, cfg.h0, level.mesh.num_elements());
    println!("err_q = {eq:.4e}  err_u = {eu:.4e}  max conservation residual = {cons:.2e}");
    if let Some(st) = &sol.coupling {
        write(cfg, "iterations.csv", &st.log_csv())?;
        write(cfg, "trace.csv", &st.trace().to_csv())?;
        write(cfg, "lambda.csv", &st.lambda.to_csv())?;
        println!(
            "iterations = {}  u_inf = {:.10}  |g - g_exact| = {:.4e}",
            st.iterations,
            st.u_inf,
            super::interface_error(&case, &st.trace())
        );
        if cfg.monolithic_check {
            let ops = level.ops.as_ref().expect("exterior case has operators");
            let coupler = Coupler::new(&level.system, ops)?;
            let u = case.u.clone();
            let f = case.f.clone();
            let src = move |x: crate::Vec2| f(x);
            let u0 = move |p: &MappedPoint| u(p.xbar);
            let mono = monolithic_solve(&coupler, &ProblemData { f: &src, u0: &u0 })?;
            let d = ops.l2_norm(&mono.trace().sub(&st.trace())) / ops.l2_norm(&mono.trace()).max(1e-300);
            println!("monolithic: relative trace difference = {d:.3e}, u_inf = {:.10}", mono.u_inf);
        }
    }
    Ok(true)
}

fn study_cmd(cfg: &RunConfig) -> Result<bool, HarnessError> {
    let case = manufactured_case(cfg.case, cfg.params)?;
    let hs = halving_sequence(cfg.h0, cfg.levels);
    let report = convergence_study(&case, &hs, cfg.coupling.n, &cfg.disc, &cfg.coupling)?;
    write(cfg, "study.csv", &report.to_csv())?;
    print!("{}", report.table());
    Ok(!report.any_failed())
}

fn sweep_cmd(cfg: &RunConfig) -> Result<bool, HarnessError> {
    let case = manufactured_case(cfg.case, cfg.params)?;
    let level = Level::build(&case, cfg.h0, cfg.coupling.n, &cfg.disc)?;
    let rows = omega_sweep(&case, &level, &cfg.omega_grid, &cfg.coupling)?;
    write(cfg, "sweep.csv", &sweep_csv(&rows))?;
    println!("{:>6} {:>10} {:>6} {:>8}", "omega", "converged", "iters", "ratio");
    for r in &rows {
        println!("{:>6} {:>10} {:>6} {:>8.3}", r.omega, r.converged, r.iterations, r.ratio);
    }
    if let Some(best) = rows
        .iter()
        .filter(|r| r.converged)
        .min_by(|a, b| a.iterations.cmp(&b.iterations).then(a.ratio.total_cmp(&b.ratio)))
    {
        println!("best omega = {} ({} iterations)", best.omega, best.iterations);
    }
    Ok(true)
}
