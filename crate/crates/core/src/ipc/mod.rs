//! Quantifier-free intuitionistic reasoning: decision procedure, Kripke
//! countermodels and classical truth tables.

pub mod classical;
pub mod kripke;
pub mod prover;

use crate::formula::Formula;

pub use classical::{classical_tautology, counter_valuation, evaluate};
pub use kripke::{find_countermodel, KripkeModel, ModelError};
pub use prover::{derivable, equivalent, prove, Prover, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IpcError {
    #[error("unsupported formula `{0}`: contains a {1}")]
    UnsupportedFormula(Formula, &'static str),
    #[error("countermodel bound must be between 1 and {max}, got {0}", max = kripke::MAX_WORLDS)]
    BadBound(usize),
    #[error("too many atoms for a truth table: {0}")]
    TooManyAtoms(usize),
}
