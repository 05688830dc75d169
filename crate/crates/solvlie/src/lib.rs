//! Numerical harmonic analysis on simply connected solvable Lie groups.
//!
//! The crate builds a concrete coordinate model of such a group from the
//! structure constants of its Lie algebra: a general-position element singles
//! out a complement of the nilradical, and the group is realized on the
//! product of that complement with the nilradical, with an explicit product
//! law assembled from truncated Campbell-Hausdorff series. On top of the
//! realization sit a polynomial-growth weight, Schwartz-type seminorms, the
//! convolution algebra, tempered-distribution pairings, and product groups
//! with kernel pairings.
//!
//! Everything is deterministic: randomized searches and quadratures draw from
//! seeded generators, so every report is reproducible bit for bit.

pub mod algebra;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod fit;
pub mod groups;
pub mod numerics;
pub mod product_groups;
pub mod realization;
pub mod schwartz;
pub mod verify;
pub mod weights;

pub use algebra::{LieAlgebra, NilradicalReport, Subspace};
pub use error::{Error, Result};
pub use realization::{GroupElement, Realization};
