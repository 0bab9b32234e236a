//! Uniform interpolants: quantifier-free formulas equivalent to `exists Y.`
//! and `forall Y.` over a propositional body.
//!
//! The existential interpolant of a context `D` is a conjunction `E(D)` and
//! the universal one for `D |- phi` a disjunction `A(D; phi)`, each with one
//! entry per decomposable formula of the sequent, following Pitts'
//! recursion over contraction-free sequents.

use std::collections::HashMap;

use serde::Serialize;

use crate::formula::{Formula, Variable};
use crate::ipc::{IpcError, Prover};
use crate::sequent::Sequent;

type Ctx = Vec<Formula>;

fn with(ctx: &Ctx, extra: &[Formula]) -> Ctx {
    let mut v = ctx.clone();
    for e in extra {
        if let Err(i) = v.binary_search(e) {
            v.insert(i, e.clone());
        }
    }
    v
}

fn without(ctx: &Ctx, f: &Formula) -> Ctx {
    ctx.iter().filter(|g| *g != f).cloned().collect()
}

// Smart constructors keep raw output from exploding with units.

fn mk_and(a: Formula, b: Formula) -> Formula {
    if a.is_top() || a == b {
        b
    } else if b.is_top() {
        a
    } else if a == Formula::Bottom || b == Formula::Bottom {
        Formula::Bottom
    } else {
        Formula::and(a, b)
    }
}

fn mk_or(a: Formula, b: Formula) -> Formula {
    if a == Formula::Bottom || a == b {
        b
    } else if b == Formula::Bottom {
        a
    } else if a.is_top() || b.is_top() {
        Formula::top()
    } else {
        Formula::or(a, b)
    }
}

fn mk_imp(a: Formula, b: Formula) -> Formula {
    if a.is_top() {
        b
    } else if a == Formula::Bottom || b.is_top() || a == b {
        Formula::top()
    } else {
        Formula::implies(a, b)
    }
}

struct Interpolator {
    p: Variable,
    e_memo: HashMap<Ctx, Formula>,
    a_memo: HashMap<(Ctx, Formula), Formula>,
}

impl Interpolator {
    fn new(p: &Variable) -> Self {
        Interpolator { p: p.clone(), e_memo: HashMap::new(), a_memo: HashMap::new() }
    }

    fn is_p(&self, f: &Formula) -> bool {
        matches!(f, Formula::Var(v) if *v == self.p)
    }

    fn e(&mut self, delta: &Ctx) -> Formula {
        if let Some(f) = self.e_memo.get(delta) {
            return f.clone();
        }
        let mut acc = Formula::top();
        for theta in delta {
            let rest = without(delta, theta);
            let row = match theta {
                Formula::Bottom => Some(Formula::Bottom),
                Formula::Var(_) if self.is_p(theta) => None,
                Formula::Var(_) => Some(theta.clone()),
                Formula::And(a, b) => Some(self.e(&with(&rest, &[(**a).clone(), (**b).clone()]))),
                Formula::Or(a, b) => {
                    let l = self.e(&with(&rest, &[(**a).clone()]));
                    let r = self.e(&with(&rest, &[(**b).clone()]));
                    Some(mk_or(l, r))
                }
                Formula::Implies(x, d) => match &**x {
                    Formula::Var(_) if rest.contains(x) => {
                        Some(self.e(&with(&rest, &[(**d).clone()])))
                    }
                    Formula::Var(_) if self.is_p(x) => None,
                    Formula::Var(_) => {
                        let inner = self.e(&with(&rest, &[(**d).clone()]));
                        Some(mk_imp((**x).clone(), inner))
                    }
                    Formula::Bottom => None,
                    Formula::And(d1, d2) => {
                        let cur = Formula::implies((**d1).clone(), Formula::implies((**d2).clone(), (**d).clone()));
                        Some(self.e(&with(&rest, &[cur])))
                    }
                    Formula::Or(d1, d2) => {
                        let l = Formula::implies((**d1).clone(), (**d).clone());
                        let r = Formula::implies((**d2).clone(), (**d).clone());
                        Some(self.e(&with(&rest, &[l, r])))
                    }
                    Formula::Implies(_, d2) => {
                        let d2d = Formula::implies((**d2).clone(), (**d).clone());
                        let ctx = with(&rest, &[d2d]);
                        let guard = mk_imp(self.e(&ctx), self.a(&ctx, x));
                        let tail = self.e(&with(&rest, &[(**d).clone()]));
                        Some(mk_imp(guard, tail))
                    }
                    _ => unreachable!("propositional input"),
                },
                _ => unreachable!("propositional input"),
            };
            if let Some(r) = row {
                acc = mk_and(acc, r);
            }
        }
        self.e_memo.insert(delta.clone(), acc.clone());
        acc
    }

    fn a(&mut self, delta: &Ctx, phi: &Formula) -> Formula {
        let key = (delta.clone(), phi.clone());
        if let Some(f) = self.a_memo.get(&key) {
            return f.clone();
        }
        let mut acc = Formula::Bottom;
        for theta in delta {
            let rest = without(delta, theta);
            let row = match theta {
                Formula::Bottom => Some(Formula::top()),
                Formula::Var(_) if theta == phi => Some(Formula::top()),
                Formula::Var(_) => None,
                Formula::And(a, b) => {
                    Some(self.a(&with(&rest, &[(**a).clone(), (**b).clone()]), phi))
                }
                Formula::Or(a, b) => {
                    let ca = with(&rest, &[(**a).clone()]);
                    let cb = with(&rest, &[(**b).clone()]);
                    let l = mk_imp(self.e(&ca), self.a(&ca, phi));
                    let r = mk_imp(self.e(&cb), self.a(&cb, phi));
                    Some(mk_and(l, r))
                }
                Formula::Implies(x, d) => match &**x {
                    Formula::Var(_) if rest.contains(x) => {
                        Some(self.a(&with(&rest, &[(**d).clone()]), phi))
                    }
                    Formula::Var(_) if self.is_p(x) => None,
                    Formula::Var(_) => {
                        let inner = self.a(&with(&rest, &[(**d).clone()]), phi);
                        Some(mk_and((**x).clone(), inner))
                    }
                    Formula::Bottom => None,
                    Formula::And(d1, d2) => {
                        let cur = Formula::implies((**d1).clone(), Formula::implies((**d2).clone(), (**d).clone()));
                        Some(self.a(&with(&rest, &[cur]), phi))
                    }
                    Formula::Or(d1, d2) => {
                        let l = Formula::implies((**d1).clone(), (**d).clone());
                        let r = Formula::implies((**d2).clone(), (**d).clone());
                        Some(self.a(&with(&rest, &[l, r]), phi))
                    }
                    Formula::Implies(_, d2) => {
                        let d2d = Formula::implies((**d2).clone(), (**d).clone());
                        let ctx = with(&rest, &[d2d]);
                        let guard = mk_imp(self.e(&ctx), self.a(&ctx, x));
                        let tail = self.a(&with(&rest, &[(**d).clone()]), phi);
                        Some(mk_and(guard, tail))
                    }
                    _ => unreachable!("propositional input"),
                },
                _ => unreachable!("propositional input"),
            };
            if let Some(r) = row {
                acc = mk_or(acc, r);
                if acc.is_top() {
                    break;
                }
            }
        }
        if !acc.is_top() {
            let right = match phi {
                Formula::Var(_) if self.is_p(phi) => None,
                Formula::Var(_) => Some(phi.clone()),
                Formula::Bottom => None,
                Formula::And(a, b) => {
                    let l = self.a(delta, a);
                    let r = self.a(delta, b);
                    Some(mk_and(l, r))
                }
                Formula::Or(a, b) => {
                    let l = self.a(delta, a);
                    let r = self.a(delta, b);
                    Some(mk_or(l, r))
                }
                Formula::Implies(a, b) => {
                    let ctx = with(delta, &[(**a).clone()]);
                    Some(mk_imp(self.e(&ctx), self.a(&ctx, b)))
                }
                _ => unreachable!("propositional input"),
            };
            if let Some(r) = right {
                acc = mk_or(acc, r);
            }
        }
        self.a_memo.insert(key, acc.clone());
        acc
    }
}

fn check_input(phi: &Formula) -> Result<(), IpcError> {
    crate::ipc::prover::check_supported(&Sequent::goal(phi.clone()))
}

/// Quantifier-free equivalent of `exists y. phi`, unsimplified.
pub fn pite_raw(phi: &Formula, y: &Variable) -> Result<Formula, IpcError> {
    check_input(phi)?;
    Ok(Interpolator::new(y).e(&vec![phi.clone()]))
}

/// Quantifier-free equivalent of `forall y. phi`, unsimplified.
pub fn pita_raw(phi: &Formula, y: &Variable) -> Result<Formula, IpcError> {
    check_input(phi)?;
    Ok(Interpolator::new(y).a(&Vec::new(), phi))
}

/// Strongest `y`-free consequence of `phi`, simplified.
pub fn pite_exists(phi: &Formula, y: &Variable) -> Result<Formula, IpcError> {
    Ok(crate::simplify::simplify(&pite_raw(phi, y)?))
}

/// Weakest `y`-free formula entailing `phi`, simplified.
pub fn pita_forall(phi: &Formula, y: &Variable) -> Result<Formula, IpcError> {
    Ok(crate::simplify::simplify(&pita_raw(phi, y)?))
}

/// All formulas with at most `max_nodes` nodes over `atoms` and `bot`,
/// with the operands of `/\` and `\/` in sorted order so that commuted
/// copies are listed once.
pub fn probe_corpus(atoms: &[Variable], max_nodes: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(); max_nodes + 1];
    if max_nodes == 0 {
        return Vec::new();
    }
    by_size[1] = atoms.iter().cloned().map(Formula::Var).collect();
    by_size[1].push(Formula::Bottom);
    for n in 3..=max_nodes {
        let mut out = Vec::new();
        for l in 1..n - 1 {
            let r = n - 1 - l;
            for a in &by_size[l] {
                for b in &by_size[r] {
                    if a <= b {
                        out.push(Formula::and(a.clone(), b.clone()));
                        out.push(Formula::or(a.clone(), b.clone()));
                    }
                    out.push(Formula::implies(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeFailure {
    pub probe: String,
    /// Whether the candidate side of the biconditional holds.
    pub candidate_side: bool,
    /// Whether the body side holds.
    pub body_side: bool,
}

/// Outcome of checking a candidate against the defining property of an
/// interpolant on a finite probe set.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    /// `phi |- candidate` (existential) or `candidate |- phi` (universal).
    pub bound_holds: bool,
    pub variable_condition: bool,
    pub probes_checked: usize,
    pub violations: Vec<ProbeFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.bound_holds && self.variable_condition && self.violations.is_empty()
    }
}

/// Checks `phi |- candidate`, `y` not free in the candidate, and
/// `candidate |- psi` iff `phi |- psi` for each probe `psi` (probes
/// mentioning `y` are skipped).
pub fn validate_interpolant(
    phi: &Formula,
    y: &Variable,
    candidate: &Formula,
    probes: &[Formula],
) -> Result<ValidationReport, IpcError> {
    validate_with(&Prover::new(), phi, y, candidate, probes, true)
}

/// Order dual of [`validate_interpolant`]: `candidate |- phi` and
/// `psi |- candidate` iff `psi |- phi`.
pub fn validate_universal(
    phi: &Formula,
    y: &Variable,
    candidate: &Formula,
    probes: &[Formula],
) -> Result<ValidationReport, IpcError> {
    validate_with(&Prover::new(), phi, y, candidate, probes, false)
}

pub fn validate_with(
    prover: &Prover,
    phi: &Formula,
    y: &Variable,
    candidate: &Formula,
    probes: &[Formula],
    existential: bool,
) -> Result<ValidationReport, IpcError> {
    let ent = |a: &Formula, b: &Formula| prover.entails(std::slice::from_ref(a), b);
    let bound_holds = if existential { ent(phi, candidate)? } else { ent(candidate, phi)? };
    let mut violations = Vec::new();
    let mut checked = 0;
    for psi in probes {
        if psi.occurs_free(y) {
            continue;
        }
        checked += 1;
        let (c, b) = if existential {
            (ent(candidate, psi)?, ent(phi, psi)?)
        } else {
            (ent(psi, candidate)?, ent(psi, phi)?)
        };
        if c != b {
            violations.push(ProbeFailure { probe: psi.to_string(), candidate_side: c, body_side: b });
        }
    }
    Ok(ValidationReport {
        bound_holds,
        variable_condition: !candidate.occurs_free(y) && candidate.is_propositional(),
        probes_checked: checked,
        violations,
    })
}

/// Full record of an interpolation run.
#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub input: Formula,
    pub bound_var: Variable,
    pub existential: Formula,
    pub universal: Formula,
    pub existential_report: Option<ValidationReport>,
    pub universal_report: Option<ValidationReport>,
}

/// Computes both interpolants and, when `probe_nodes` is given, validates
/// them against the probe corpus of that size over the other free atoms.
pub fn interpolate(
    phi: &Formula,
    y: &Variable,
    probe_nodes: Option<usize>,
) -> Result<InterpolationResult, IpcError> {
    let existential = pite_exists(phi, y)?;
    let universal = pita_forall(phi, y)?;
    let (er, ur) = match probe_nodes {
        Some(n) => {
            let atoms: Vec<Variable> = phi.free_vars().into_iter().filter(|v| v != y).collect();
            let probes = probe_corpus(&atoms, n);
            let prover = Prover::new();
            (
                Some(validate_with(&prover, phi, y, &existential, &probes, true)?),
                Some(validate_with(&prover, phi, y, &universal, &probes, false)?),
            )
        }
        None => (None, None),
    };
    Ok(InterpolationResult {
        input: phi.clone(),
        bound_var: y.clone(),
        existential,
        universal,
        existential_report: er,
        universal_report: ur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipc::equivalent;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn y() -> Variable {
        Variable::new("Y")
    }

    #[test]
    fn small_existentials() {
        let cases = [
            ("Y /\\ (Y -> Q)", "Q"),
            ("Y -> Q", "top"),
            ("(Q -> Y) -> R", "~Q -> R"),
            ("X", "X"),
            ("Y \\/ ~Y", "top"),
            ("Y /\\ ~Y", "bot"),
        ];
        for (body, expected) in cases {
            let e = pite_raw(&f(body), &y()).unwrap();
            assert!(equivalent(&e, &f(expected)).unwrap(), "{body}: got {e}");
        }
    }

    #[test]
    fn small_universals() {
        let cases = [("Y", "bot"), ("X \\/ Y", "X"), ("X", "X"), ("Y -> Y", "top"), ("~~Y -> Y", "bot"), ("X \\/ (Y -> Z)", "X \\/ Z")];
        for (body, expected) in cases {
            let a = pita_raw(&f(body), &y()).unwrap();
            assert!(equivalent(&a, &f(expected)).unwrap(), "{body}: got {a}");
        }
    }

    #[test]
    fn corpus_sizes() {
        let atoms = [Variable::new("P")];
        let c = probe_corpus(&atoms, 3);
        // P, bot, P/\P, P\/P, P->P, P/\bot ... 2 leaves: 3 ordered pairs for
        // /\ and \/, 4 for ->
        assert_eq!(c.len(), 2 + 3 + 3 + 4);
    }
}
