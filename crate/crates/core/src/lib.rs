//! Implicit resolution: refutations described by a circuit over a
//! tree-like resolution proof, a verifier for them, and translators from
//! extended resolution.

pub mod circuits;
pub mod cli;
pub mod correctness;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod formulas;
pub mod fuzz;
pub mod implicit;
pub mod oracles;
pub mod proofs;
pub mod prover;
pub mod tableau;
pub mod translate;

pub use error::{Error, Result};
