//! Two-valued truth tables.

use std::collections::BTreeMap;

use crate::formula::{Formula, Variable};
use crate::sequent::Sequent;

use super::prover::check_supported;
use super::IpcError;

/// Classical truth value under an assignment; atoms absent from the map are
/// false.
pub fn evaluate(f: &Formula, assignment: &BTreeMap<Variable, bool>) -> bool {
    match f {
        Formula::Var(v) => assignment.get(v).copied().unwrap_or(false),
        Formula::Bottom => false,
        Formula::And(a, b) => evaluate(a, assignment) && evaluate(b, assignment),
        Formula::Or(a, b) => evaluate(a, assignment) || evaluate(b, assignment),
        Formula::Implies(a, b) => !evaluate(a, assignment) || evaluate(b, assignment),
        Formula::Exists(..) | Formula::Forall(..) | Formula::App(..) => false,
    }
}

/// First falsifying assignment of `f` in binary counting order over its
/// sorted atoms, if any.
pub fn counter_valuation(f: &Formula) -> Result<Option<BTreeMap<Variable, bool>>, IpcError> {
    check_supported(&Sequent::goal(f.clone()))?;
    let atoms: Vec<Variable> = f.free_vars().into_iter().collect();
    if atoms.len() > 24 {
        return Err(IpcError::TooManyAtoms(atoms.len()));
    }
    for bits in 0u32..(1 << atoms.len()) {
        let a: BTreeMap<Variable, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), bits >> i & 1 == 1))
            .collect();
        if !evaluate(f, &a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

pub fn classical_tautology(f: &Formula) -> Result<bool, IpcError> {
    Ok(counter_valuation(f)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn taut(s: &str) -> bool {
        classical_tautology(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn tables() {
        assert!(taut("P \\/ ~P"));
        assert!(!taut("bot"));
        assert!(taut("~Y \\/ ~~Y"));
        assert!(taut("((P -> Q) -> P) -> P"));
        assert!(!taut("P -> Q"));
    }
}
