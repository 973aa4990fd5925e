//! Dirac operators `D = Σ ∂_j ⊗ F_j` built from Lie group actions on
//! C*-algebras, at finite truncation, together with numerical certificates for
//! the structure they carry: Clifford signs, bounded commutators, grading,
//! real structure, first-order condition, eigenvalue majorization and
//! summability estimates.
//!
//! The algebra side is the smooth noncommutative torus (finitely supported
//! Fourier series); the group side covers tori and SU(2) through
//! Peter-Weyl weight blocks.

pub mod axioms;
pub mod cli;
pub mod clifford;
pub mod dirac;
pub mod error;
pub mod linalg;
pub mod nctorus;
pub mod peterweyl;
pub mod sparse;
pub mod summability;

pub use error::{Error, Result};
