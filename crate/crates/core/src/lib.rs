//! Exact characteristic-cycle calculus for constructible functions on
//! stratified subspaces of complex projective space.
//!
//! The crate computes Chern–Schwartz–MacPherson classes, characteristic
//! cycles and their Segre classes on linear stratifications (hyperplane
//! arrangements, flags, products), and checks the intersection formula, the
//! Verdier–Riemann–Roch identity for non-characteristic pullbacks and the
//! micro-local index formula exactly.

pub mod arrangements;
pub mod chow;
pub mod error;
pub mod generate;
pub mod lagrangian;
pub mod linalg;
pub mod microlocal;
pub mod strata;

pub use error::{Error, Result};
