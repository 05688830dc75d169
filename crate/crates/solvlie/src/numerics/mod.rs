//! Small dense-matrix and quadrature utilities shared by all other modules.
//!
//! Everything here is pure; quadrature summation order is fixed so results
//! are deterministic.

pub mod deriv;
pub mod linalg;
pub mod matrix;
pub mod neldermead;
pub mod quad;

pub use deriv::{derivative_at_zero, directional_derivative, MAX_DERIVATIVE_ORDER};
pub use matrix::{matrix_exp, operator_norm, symmetric_eigen, symmetric_eigenvalues, Matrix};
pub use quad::{
    gauss_legendre, integrate, integrate_rectangle, integrate_with_tail, monte_carlo, Box,
    QuadResult,
};
