//! Numerical verification of isometric and symmetric defect identities for
//! commuting tuples of complex matrices.
//!
//! For tuples `A = (A_1, ..., A_d)` and `B = (B_1, ..., B_d)` of `n × n`
//! matrices the engine evaluates
//!
//! * `Σ(X) = Σ_i A_i X B_i`,
//! * `Δ^m(X) = Σ_j (-1)^j C(m, j) Σ^j(X)` (isometric defect),
//! * `δ^n(X) = Σ_j (-1)^j C(n, j) (ΣA)^{n-j} X (ΣB)^j` (symmetric defect),
//!
//! classifies pairs by the least degree at which the defects vanish, generates
//! seeded instances with known degrees, and runs randomized campaigns that
//! check the degree bounds for nilpotent perturbations, products and tensor
//! products of tuples.

pub mod classify;
pub mod error;
pub mod generators;
pub mod golden;
pub mod matrix;
pub mod multiindex;
pub mod par;
pub mod transforms;
pub mod tuples;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{CMatrix, Tolerance, C64};
pub use tuples::{OperatorTuple, PowerConvention};
