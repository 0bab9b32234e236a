//! Seeded property suites cross-checking the prover, the interpolator and
//! the kernel against independent oracles.

use serde::Serialize;

use crate::formula::{Formula, Variable};
use crate::ipc::{classical_tautology, find_countermodel, IpcError, Prover, Witness};
use crate::kernel::{check_tree, derive_extensionality, SchemaTheory};
use crate::pitts::{pita_forall, pite_exists};
use crate::random::FormulaGen;
use crate::sequent::Sequent;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Case counts for [`run_all`].
#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    pub oracle: usize,
    pub glivenko: usize,
    pub interpolation: usize,
    pub extensionality: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes { oracle: 500, glivenko: 200, interpolation: 100, extensionality: 100 }
    }
}

pub const ORACLE_WORLDS: usize = 6;

pub fn run_all(seed: u64, sizes: Sizes) -> Result<SelftestReport, IpcError> {
    // independent suites get independent streams so that changing one
    // count does not shift the cases of another
    let suites = vec![
        prover_oracle(seed, sizes.oracle)?,
        glivenko(seed.wrapping_add(1), sizes.glivenko)?,
        interpolation_invariants(seed.wrapping_add(2), sizes.interpolation)?,
        extensionality(seed.wrapping_add(3), sizes.extensionality)?,
    ];
    Ok(SelftestReport { seed, suites })
}

/// Random formulas over `P, Q, R` with at most 12 nodes. A proof must pass
/// the kernel and have no countermodel of up to [`ORACLE_WORLDS`] worlds;
/// a refutation must come with a countermodel of that size that really
/// refutes the formula. Provable formulas must also be classical
/// tautologies.
pub fn prover_oracle(seed: u64, cases: usize) -> Result<SuiteResult, IpcError> {
    let prover = Prover::new();
    let mut failures = Vec::new();
    for f in FormulaGen::new(seed, &["P", "Q", "R"], 12).take(cases) {
        let s = Sequent::goal(f.clone());
        let v = prover.prove_bounded(&s, ORACLE_WORLDS)?;
        match v.witness {
            Witness::Proof(t) => {
                if let Err(e) = check_tree(&t, &SchemaTheory::empty()) {
                    failures.push(format!("{f}: proof rejected: {e}"));
                } else if !t.conclusion.same_as(&s) {
                    failures.push(format!("{f}: proof concludes {}", t.conclusion));
                }
                if let Some(m) = find_countermodel(&s, ORACLE_WORLDS)? {
                    failures.push(format!("{f}: provable but refuted by a {}-world model", m.worlds()));
                }
                if !classical_tautology(&f)? {
                    failures.push(format!("{f}: provable but not a classical tautology"));
                }
            }
            Witness::Countermodel { model, world } => {
                if model.validate().is_err() || !model.refutes_at(&s, world) {
                    failures.push(format!("{f}: reported countermodel does not refute"));
                }
            }
            Witness::Unknown { .. } => {
                failures.push(format!("{f}: refuted without a countermodel of {ORACLE_WORLDS} worlds"));
            }
        }
    }
    Ok(SuiteResult { name: "prover-oracle".into(), cases, failures })
}

/// `|- ~~f` is provable exactly when `f` is a classical tautology.
pub fn glivenko(seed: u64, cases: usize) -> Result<SuiteResult, IpcError> {
    let prover = Prover::new();
    let mut failures = Vec::new();
    for f in FormulaGen::new(seed, &["P", "Q", "R"], 12).take(cases) {
        let nn = Formula::not(Formula::not(f.clone()));
        let ipc = prover.derivable(&Sequent::goal(nn))?;
        let cl = classical_tautology(&f)?;
        if ipc != cl {
            failures.push(format!("{f}: |- ~~f is {ipc}, classical tautology is {cl}"));
        }
    }
    Ok(SuiteResult { name: "glivenko".into(), cases, failures })
}

/// For random `phi` over `P, Q, Y` and the weakening `phi \/ psi`:
/// both interpolants are monotone, idempotent, `Y`-free and bound `phi`
/// from the correct side.
pub fn interpolation_invariants(seed: u64, cases: usize) -> Result<SuiteResult, IpcError> {
    let prover = Prover::new();
    let y = Variable::new("Y");
    let mut gen = FormulaGen::new(seed, &["P", "Q", "Y"], 9);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let phi = gen.formula();
        let psi = Formula::or(phi.clone(), gen.formula());
        let (e1, e2) = (pite_exists(&phi, &y)?, pite_exists(&psi, &y)?);
        let (a1, a2) = (pita_forall(&phi, &y)?, pita_forall(&psi, &y)?);
        let ent = |a: &Formula, b: &Formula| prover.entails(std::slice::from_ref(a), b);
        let mut fail = |what: &str| failures.push(format!("phi = {phi}, psi = {psi}: {what}"));
        if !ent(&e1, &e2)? {
            fail("exists not monotone");
        }
        if !ent(&a1, &a2)? {
            fail("forall not monotone");
        }
        if !prover.equivalent(&pite_exists(&e1, &y)?, &e1)? || !prover.equivalent(&pita_forall(&a1, &y)?, &a1)? {
            fail("not idempotent");
        }
        if e1.occurs_free(&y) || a1.occurs_free(&y) {
            fail("bound variable survives");
        }
        if !ent(&phi, &e1)? || !ent(&a1, &phi)? {
            fail("interpolant on the wrong side");
        }
    }
    Ok(SuiteResult { name: "interpolation".into(), cases, failures })
}

/// Kernel-checks extensionality trees for random contexts and random
/// replacements.
pub fn extensionality(seed: u64, cases: usize) -> Result<SuiteResult, IpcError> {
    let hole = Variable::new("H");
    let mut ctx_gen = FormulaGen::new(seed, &["P", "H"], 9);
    let mut gen = FormulaGen::new(seed ^ 0x5eed, &["P", "Q"], 5);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let ctx = ctx_gen.formula();
        let (p, p2) = (gen.formula(), gen.formula());
        match derive_extensionality(&ctx, &hole, &p, &p2) {
            Ok(t) => {
                if let Err(e) = check_tree(&t, &SchemaTheory::empty()) {
                    failures.push(format!("{ctx} [{p} / {p2}]: {e}"));
                }
            }
            Err(e) => failures.push(format!("{ctx} [{p} / {p2}]: {e}")),
        }
    }
    Ok(SuiteResult { name: "extensionality".into(), cases, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let sizes = Sizes { oracle: 40, glivenko: 40, interpolation: 10, extensionality: 20 };
        let a = run_all(3, sizes).unwrap();
        assert!(a.passed(), "{a:?}");
        let b = run_all(3, sizes).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
