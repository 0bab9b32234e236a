//! Intuitionistic propositional logic workbench: formulas, a checkable
//! sequent calculus with axiom schemas, a decision procedure with Kripke
//! countermodels, uniform interpolants and tools for studying second-order
//! definable connectives.

pub mod formula;
pub mod ipc;
pub mod kernel;
pub mod lab;
pub mod sequent;
pub mod syntax;

pub use formula::{ConnectiveSymbol, Formula, Macro, Signature, Variable};
pub use kernel::{check_tree, derive_extensionality, KernelError, ProofTree, Rule, SchemaTheory};
pub use sequent::Sequent;
pub use syntax::{parse_formula, parse_formula_in, print, ParseError};
pub mod pitts;
pub mod random;
pub mod script;
pub mod selftest;
pub mod simplify;
