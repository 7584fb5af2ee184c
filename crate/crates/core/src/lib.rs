//! Numerical verification of entropic uncertainty relations with quantum side
//! information, refined by a measurement-reversal (rotated Petz) recovery term.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the command line
//! live in the companion `eurqsi` crate.
//!
//! Module map:
//! - [`qmat`]: dense complex matrices, Hermitian eigensolver, matrix functions.
//! - [`qstate`]: density operators, projective measurements, cq-states.
//! - [`entropy`]: von Neumann, conditional and relative entropies (bits).
//! - [`recovery`]: CP maps, Petz and rotated-Petz recovery, the explicit recovery map.
//! - [`eur`]: uncertainty-relation checkers and the fuzzing harness.
//! - [`gallery`]: the four worked examples as golden cases.
//! - [`simx`]: density-matrix circuit simulator for the six reversal experiments.
#![no_std]

extern crate alloc;

pub mod entropy;
pub mod error;
pub mod eur;
pub mod gallery;
pub mod qmat;
pub mod qstate;
pub mod recovery;
pub mod simx;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
