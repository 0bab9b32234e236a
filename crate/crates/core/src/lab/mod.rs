//! Tools for studying connectives: auxiliary formulas of definable
//! connectives, the one-variable lattice, and replay of the bundled proof
//! scripts.

pub mod connective;
pub mod replay;
pub mod rn;

use crate::ipc::IpcError;
use crate::kernel::KernelError;

pub use connective::{extract_auxiliary, is_auxiliary, AuxiliaryReport, Extraction, RegularConnective};
pub use replay::{replay, ReplayError, ReplayReport, SUITES};
pub use rn::{check_rieger_lower_facts, rn_classify, LowerFacts, RnClass, RnLevel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    #[error("not a propositional formula: {0}")]
    InvalidBody(String),
    #[error(transparent)]
    Ipc(#[from] IpcError),
    #[error("tree rejected by the kernel: {0}")]
    Kernel(#[from] KernelError),
    #[error("candidate mentions `{0}`, which is not a parameter of the connective")]
    ForeignVariable(String),
    #[error("tree contains a cut")]
    NotCutFree,
    #[error("tree concludes `{found}`, expected `{expected}`")]
    WrongConclusion { expected: String, found: String },
    #[error("extraction reached a left disjunction; the candidate would need a disjunction of witnesses")]
    DisjunctionNeeded,
    #[error("no eligible rule: extraction stopped at `{0}`")]
    NoEligibleRule(String),
    #[error("formula `{0}` has more than one variable")]
    NotOneVariable(String),
    #[error("no lattice element up to level {0} is equivalent")]
    LevelExceeded(usize),
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
}
