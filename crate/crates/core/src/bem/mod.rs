//! Spectral Galerkin discretization of the exterior boundary integral equation on `Γ`.
//!
//! Sign conventions: `n` is the outward normal of the region enclosed by `Γ`,
//! `g` is the Dirichlet trace and `λ = ∂_n u` the normal derivative of the
//! exterior solution. The representation is `u = 𝒟g - 𝒮λ + u_∞` and the
//! densities satisfy `(½ - 𝒦) g = -𝒱λ + u_∞` with `λ` mean-zero.

mod exterior;
mod operators;
mod trig;

pub use exterior::{evaluate_exterior, ExteriorSolution, DEFAULT_STANDOFF};
pub use operators::{
    assemble_layer_operators, double_layer_kernel, single_layer_kernel, BemScheme, LayerOperatorSet,
};
pub use trig::{nodes, Mode, TrigPolynomial};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BemError {
    #[error("expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("density is not mean-zero (weighted mean {mean:e})")]
    NotMeanZero { mean: f64 },
    #[error("point ({x}, {y}) is not in the exterior domain")]
    Domain { x: f64, y: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("boundary solver: {0}")]
    Solver(String),
}
