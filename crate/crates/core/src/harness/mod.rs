//! Manufactured solutions, convergence studies, relaxation sweeps and the
//! command-line driver.

mod cases;
pub mod cli;
mod config;
mod study;

pub use cases::{manufactured_case, CaseId, CaseParams, ManufacturedCase};
pub use config::RunConfig;
pub use study::{
    convergence_study, halving_sequence, interface_error, omega_sweep, rate, solve_level, sweep_csv, Discretization,
    Level, LevelSolution, StudyReport, StudyRow, SweepRow,
};

use thiserror::Error;

use crate::bem::BemError;
use crate::coupling::CouplingError;
use crate::geometry::GeometryError;
use crate::hdg::HdgError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("config error in '{key}': {msg}")]
    Config { key: String, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Hdg(#[from] HdgError),
    #[error(transparent)]
    Bem(#[from] BemError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::UnknownCase(_) => 2,
            _ => 1,
        }
    }
}
