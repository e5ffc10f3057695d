//! Positive trace-preserving maps and entanglement witnesses built from
//! mutually unbiased measurements (MUMs).
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Kronecker products, partial transpose,
//!   Hermitian eigendecomposition.
//! * [`basis`]: orthonormal Hermitian operator bases (Gell-Mann, the modified
//!   diagonal basis, MUB-derived bases for prime d, custom JSON bases).
//! * [`mum`]: measurement families `P = I/d + t F`, the κ ↔ t relation and κ_opt.
//! * [`rotations`]: real orthogonal matrices fixing (or flipping) n★ = (1,…,1)/√d.
//! * [`witness`]: the maps Φ, the witnesses W and W̃, Q-matrices and the
//!   CCNR-class operator W′.
//! * [`verify`]: positivity sampling, see-saw block-positivity, PPT tests,
//!   detection and decomposition certificates.
//! * [`golden`]: reference matrices used by the reproduction checks.
//! * [`cli`]: the `mumw` command-line front end.

pub mod basis;
pub mod cli;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod mum;
pub mod random;
pub mod reproduce;
pub mod report;
pub mod rotations;
pub mod verify;
pub mod witness;

pub use basis::{BasisLabel, HermitianBasis};
pub use error::{Error, Result};
pub use linalg::{BipartiteOperator, ComplexMatrix};
pub use mum::{FOperators, MumFamily};
pub use rotations::StarRotation;
pub use witness::WitnessSpec;
