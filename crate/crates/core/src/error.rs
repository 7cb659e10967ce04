use thiserror::Error;

use crate::formulas::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("variable {var} exceeds bound {bound} ({context})")]
    VarOutOfRange { var: Var, bound: Var, context: String },
    #[error("{what} = {value} exceeds the limit {limit}")]
    GuardExceeded { what: &'static str, value: usize, limit: usize },
    #[error("invalid circuit: {0}")]
    Circuit(#[from] crate::circuits::CircuitViolation),
    #[error("invalid proof: {0}")]
    Proof(#[from] crate::proofs::ProofError),
    #[error("invalid extended resolution proof: {0}")]
    ErProof(#[from] crate::proofs::ErError),
    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line: line + 1, msg: msg.into() }
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Error {
        Error::Precondition(msg.into())
    }
}
