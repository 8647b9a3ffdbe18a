//! Unfitted HDG discretization of the interior Dirichlet problem with
//! boundary data transferred from the true curves along short paths.

pub mod basis;
mod diagnostics;
mod export;
mod field;
mod local;
mod material;
mod projection;
mod system;
mod transfer;
mod uncondensed;

pub use export::coefficients_csv;
pub use field::DgField;
pub use local::{assemble_local, Affine, HdgSpace, LocalBlocks};
pub use material::{MaterialField, Sym2};
pub use projection::{hdg_projection, HdgProjection};
pub use system::{BoundaryData, Csr, HdgSystem, Source, SystemOptions};
pub(crate) use system::{relative_residual as relative_residual_of, sparse_lu as sparse_lu_of};
pub use transfer::{assemble_transfer, path_integral, TransferCoupling};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdgError {
    #[error("element {element} is degenerate")]
    DegenerateElement { element: usize },
    #[error("diffusion coefficient is not symmetric positive definite in element {element}")]
    Material { element: usize },
    #[error("local solver of element {element} is singular (τ = {tau})")]
    SingularLocal { element: usize, tau: f64 },
    #[error("boundary edge {edge} has no boundary map data")]
    MissingBoundaryData { edge: usize },
    #[error("no extension patch covers curve parameter {param}")]
    Coverage { param: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear solver: {0}")]
    Solver(String),
}
