//! Unfitted hybridizable discontinuous Galerkin (HDG) interior solver coupled to a
//! spectral Galerkin boundary-element exterior solver, for two-dimensional
//! diffusion problems posed on an unbounded domain.
//!
//! The interior annulus between an obstacle `Γ₀` and an artificial circle `Γ`
//! is meshed with a polygonal subdomain that does not fit either curve. Boundary
//! data is carried from the true curves to the polygonal boundary by integrating
//! the discrete flux along short transfer paths. The exterior is represented by
//! single and double layer potentials on `Γ`, discretized with trigonometric
//! polynomials. Both solvers exchange Dirichlet and Neumann data through a
//! relaxed fixed-point iteration.

// NaN must fail these checks, so `!(x < tol)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bem;
pub mod coupling;
pub mod geometry;
pub mod harness;
pub mod hdg;
pub mod quadrature;

pub use geometry::Vec2;
