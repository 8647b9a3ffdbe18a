//! Relaxed Dirichlet-to-Neumann / Neumann-to-Dirichlet iteration between the
//! interior HDG solver and the exterior boundary-element solver.
//!
//! The Dirichlet trace on `Γ` is split as `g + c` with `g` mean-zero. The
//! boundary integral equation tested against mean-zero functions fixes `g`
//! but is blind to `c`; the constant is fixed instead by requiring the
//! interior flux through `Γ` to have zero mean, which is the mean-zero
//! constraint on the exterior Neumann density.

mod fixed_point;
mod monolithic;

pub use fixed_point::{
    estimate_contraction, relax_update, CouplingConfig, CouplingState, Coupler, DtnResult, NtdResult, ProblemData,
};
pub use monolithic::{monolithic_solve, MonolithicSolution};

use thiserror::Error;

use crate::bem::BemError;
use crate::hdg::HdgError;

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("invalid configuration '{key}': {msg}")]
    Config { key: &'static str, msg: String },
    #[error(transparent)]
    Hdg(#[from] HdgError),
    #[error(transparent)]
    Bem(#[from] BemError),
    #[error("no convergence after {} iterations (last update {:.3e})", history.len(), history.last().copied().unwrap_or(f64::NAN))]
    NotConverged { history: Vec<f64> },
    #[error("contraction estimate needs at least 3 update norms, got {0}")]
    ShortHistory(usize),
    #[error("degree mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("monolithic oracle: {0}")]
    Oracle(String),
}
