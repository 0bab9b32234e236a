//! Contraction-free decision procedure (G4ip) for propositional
//! intuitionistic sequents, and translation of its derivations into the
//! kernel calculus.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::formula::Formula;
use crate::kernel::{fit, ProofTree};
use crate::sequent::Sequent;

use super::kripke::{find_countermodel, KripkeModel};
use super::IpcError;

/// Sorted, duplicate-free context.
type Ctx = Vec<Formula>;

fn ctx_of(hyps: &[Formula]) -> Ctx {
    let mut v = hyps.to_vec();
    v.sort();
    v.dedup();
    v
}

fn without(ctx: &Ctx, f: &Formula) -> Ctx {
    ctx.iter().filter(|g| *g != f).cloned().collect()
}

fn with(ctx: &Ctx, extra: &[Formula]) -> Ctx {
    let mut v = ctx.clone();
    for e in extra {
        if let Err(i) = v.binary_search(e) {
            v.insert(i, e.clone());
        }
    }
    v
}

fn has(ctx: &Ctx, f: &Formula) -> bool {
    ctx.binary_search(f).is_ok()
}

/// The step chosen for a context and goal. Invertible steps come first in a
/// fixed order, which makes both the verdict and the emitted tree
/// deterministic.
#[derive(Clone)]
enum Step {
    Bottom,
    Axiom,
    AndL(Formula),
    OrL(Formula),
    BotImp(Formula),
    AtomImp(Formula),
    AndImp(Formula),
    OrImp(Formula),
    AndR,
    ImpR,
    Stuck,
}

fn invertible_step(ctx: &Ctx, goal: &Formula) -> Step {
    if has(ctx, &Formula::Bottom) {
        return Step::Bottom;
    }
    if has(ctx, goal) {
        return Step::Axiom;
    }
    for f in ctx {
        match f {
            Formula::And(..) => return Step::AndL(f.clone()),
            Formula::Or(..) => return Step::OrL(f.clone()),
            Formula::Implies(a, _) => match &**a {
                Formula::Bottom => return Step::BotImp(f.clone()),
                Formula::Var(_) if has(ctx, a) => return Step::AtomImp(f.clone()),
                Formula::And(..) => return Step::AndImp(f.clone()),
                Formula::Or(..) => return Step::OrImp(f.clone()),
                _ => {}
            },
            _ => {}
        }
    }
    match goal {
        Formula::And(..) => Step::AndR,
        Formula::Implies(..) => Step::ImpR,
        _ => Step::Stuck,
    }
}

fn parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => (a, b),
        _ => unreachable!("binary formula expected"),
    }
}

/// Reusable prover with a derivability cache. Not `Sync`; create one per
/// thread.
#[derive(Default)]
pub struct Prover {
    memo: RefCell<HashMap<(Ctx, Formula), bool>>,
}

/// Outcome of a provability query.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub provable: bool,
    pub witness: Witness,
}

#[derive(Clone, Debug)]
pub enum Witness {
    Proof(ProofTree),
    Countermodel { model: KripkeModel, world: usize },
    /// Refuted, but no countermodel within the given number of worlds.
    Unknown { bound: usize },
}

pub fn check_supported(s: &Sequent) -> Result<(), IpcError> {
    for f in s.hyps.iter().chain(std::iter::once(&s.concl)) {
        if !f.is_quantifier_free() {
            return Err(IpcError::UnsupportedFormula(f.clone(), "quantifier"));
        }
        if f.has_app() {
            return Err(IpcError::UnsupportedFormula(f.clone(), "connective application"));
        }
    }
    Ok(())
}

impl Prover {
    pub fn new() -> Self {
        Self::default()
    }

    /// Decides derivability without building a proof.
    pub fn derivable(&self, s: &Sequent) -> Result<bool, IpcError> {
        check_supported(s)?;
        Ok(self.decide(&ctx_of(&s.hyps), &s.concl))
    }

    pub fn entails(&self, hyps: &[Formula], concl: &Formula) -> Result<bool, IpcError> {
        self.derivable(&Sequent::new(hyps.to_vec(), concl.clone()))
    }

    pub fn equivalent(&self, a: &Formula, b: &Formula) -> Result<bool, IpcError> {
        Ok(self.entails(std::slice::from_ref(a), b)? && self.entails(std::slice::from_ref(b), a)?)
    }

    /// Decides and produces a witness: a kernel tree when provable, a
    /// countermodel of at most `bound` worlds otherwise.
    pub fn prove_bounded(&self, s: &Sequent, bound: usize) -> Result<Verdict, IpcError> {
        check_supported(s)?;
        if self.decide(&ctx_of(&s.hyps), &s.concl) {
            let tree = self.build(&ctx_of(&s.hyps), &s.concl);
            let tree = fit(tree, &s.hyps).expect("proof hypotheses drawn from the sequent");
            Ok(Verdict { provable: true, witness: Witness::Proof(tree) })
        } else {
            let witness = match find_countermodel(s, bound)? {
                Some(model) => Witness::Countermodel { model, world: 0 },
                None => Witness::Unknown { bound },
            };
            Ok(Verdict { provable: false, witness })
        }
    }

    pub fn cache_len(&self) -> usize {
        self.memo.borrow().len()
    }

    fn decide(&self, ctx: &Ctx, goal: &Formula) -> bool {
        let key = (ctx.clone(), goal.clone());
        if let Some(&b) = self.memo.borrow().get(&key) {
            return b;
        }
        let r = self.decide_uncached(ctx, goal);
        self.memo.borrow_mut().insert(key, r);
        r
    }

    fn decide_uncached(&self, ctx: &Ctx, goal: &Formula) -> bool {
        match invertible_step(ctx, goal) {
            Step::Bottom | Step::Axiom => true,
            Step::AndL(f) => {
                let (a, b) = parts(&f);
                self.decide(&with(&without(ctx, &f), &[a.clone(), b.clone()]), goal)
            }
            Step::OrL(f) => {
                let (a, b) = parts(&f);
                let rest = without(ctx, &f);
                self.decide(&with(&rest, std::slice::from_ref(a)), goal)
                    && self.decide(&with(&rest, std::slice::from_ref(b)), goal)
            }
            Step::BotImp(f) => self.decide(&without(ctx, &f), goal),
            Step::AtomImp(f) => {
                let (_, b) = parts(&f);
                self.decide(&with(&without(ctx, &f), std::slice::from_ref(b)), goal)
            }
            Step::AndImp(f) => {
                let (cd, b) = parts(&f);
                let (c, d) = parts(cd);
                let curried = Formula::implies(c.clone(), Formula::implies(d.clone(), b.clone()));
                self.decide(&with(&without(ctx, &f), &[curried]), goal)
            }
            Step::OrImp(f) => {
                let (cd, b) = parts(&f);
                let (c, d) = parts(cd);
                let l = Formula::implies(c.clone(), b.clone());
                let r = Formula::implies(d.clone(), b.clone());
                self.decide(&with(&without(ctx, &f), &[l, r]), goal)
            }
            Step::AndR => {
                let (a, b) = parts(goal);
                self.decide(ctx, a) && self.decide(ctx, b)
            }
            Step::ImpR => {
                let (a, b) = parts(goal);
                self.decide(&with(ctx, std::slice::from_ref(a)), b)
            }
            Step::Stuck => self.choice(ctx, goal).is_some(),
        }
    }

    /// First successful non-invertible step: 0 / 1 for the disjuncts, or
    /// 2 + index of the nested implication hypothesis.
    fn choice(&self, ctx: &Ctx, goal: &Formula) -> Option<usize> {
        if let Formula::Or(a, b) = goal {
            if self.decide(ctx, a) {
                return Some(0);
            }
            if self.decide(ctx, b) {
                return Some(1);
            }
        }
        for (i, f) in ctx.iter().enumerate() {
            if let Formula::Implies(cd, b) = f {
                if let Formula::Implies(c, d) = &**cd {
                    let rest = without(ctx, f);
                    let db = Formula::implies((**d).clone(), (**b).clone());
                    if self.decide(&with(&rest, &[db]), cd)
                        && self.decide(&with(&rest, &[(**b).clone()]), goal)
                    {
                        return Some(2 + i);
                    }
                    let _ = c;
                }
            }
        }
        None
    }

    /// Kernel tree for a derivable `ctx |- goal` whose hypotheses are
    /// exactly the elements of `ctx`, each once.
    fn build(&self, ctx: &Ctx, goal: &Formula) -> ProofTree {
        let t = self.build_raw(ctx, goal);
        fit(t, ctx).expect("subproof hypotheses within context")
    }

    fn build_raw(&self, ctx: &Ctx, goal: &Formula) -> ProofTree {
        match invertible_step(ctx, goal) {
            Step::Bottom => ProofTree::bot_l(goal.clone()),
            Step::Axiom => ProofTree::ax(goal.clone()),
            Step::AndL(f) => {
                let (a, b) = parts(&f);
                let rest = without(ctx, &f);
                let t = self.build(&with(&rest, &[a.clone(), b.clone()]), goal);
                let mut target = rest.clone();
                target.push(a.clone());
                target.push(b.clone());
                let t = fit(t, &target).unwrap();
                t.and_l1(a, b.clone()).and_l2(a.clone(), b).contract_l(&f)
            }
            Step::OrL(f) => {
                let (a, b) = parts(&f);
                let rest = without(ctx, &f);
                let ta = self.build(&with(&rest, std::slice::from_ref(a)), goal);
                let tb = self.build(&with(&rest, std::slice::from_ref(b)), goal);
                let mut ra = rest.clone();
                ra.push(a.clone());
                let mut rb = rest;
                rb.push(b.clone());
                ProofTree::or_l(fit(ta, &ra).unwrap(), fit(tb, &rb).unwrap(), a, b)
            }
            Step::BotImp(f) => self.build(&without(ctx, &f), goal).weaken_l(f),
            Step::AtomImp(f) => {
                let (q, b) = parts(&f);
                let rest = without(ctx, &f);
                let t = self.build(&with(&rest, std::slice::from_ref(b)), goal);
                let mut target = rest;
                target.push(b.clone());
                let t = fit(t, &target).unwrap();
                ProofTree::imp_l(ProofTree::ax(q.clone()), t, b).contract_l(q)
            }
            Step::AndImp(f) => {
                let (cd, b) = parts(&f);
                let (c, d) = parts(cd);
                let curried = Formula::implies(c.clone(), Formula::implies(d.clone(), b.clone()));
                let rest = without(ctx, &f);
                let t = self.build(&with(&rest, std::slice::from_ref(&curried)), goal);
                let mut target = rest;
                target.push(curried);
                let t = fit(t, &target).unwrap();
                ProofTree::cut(curry_lemma(c, d, b), t)
            }
            Step::OrImp(f) => {
                let (cd, b) = parts(&f);
                let (c, d) = parts(cd);
                let cb = Formula::implies(c.clone(), b.clone());
                let db = Formula::implies(d.clone(), b.clone());
                let rest = without(ctx, &f);
                let t = self.build(&with(&rest, &[cb.clone(), db.clone()]), goal);
                let mut target = rest;
                target.push(cb);
                target.push(db);
                let t = fit(t, &target).unwrap();
                let t = ProofTree::cut(disjunct_lemma(c, d, b, true), t);
                ProofTree::cut(disjunct_lemma(c, d, b, false), t).contract_l(&f)
            }
            Step::AndR => {
                let (a, b) = parts(goal);
                ProofTree::and_r(self.build(ctx, a), self.build(ctx, b))
            }
            Step::ImpR => {
                let (a, b) = parts(goal);
                let t = self.build(&with(ctx, std::slice::from_ref(a)), b);
                let mut target = ctx.clone();
                target.push(a.clone());
                fit(t, &target).unwrap().imp_r(a)
            }
            Step::Stuck => {
                let k = self.choice(ctx, goal).expect("build called on derivable sequent");
                match (k, goal) {
                    (0, Formula::Or(a, b)) => self.build(ctx, a).or_r1((**b).clone()),
                    (1, Formula::Or(a, b)) => self.build(ctx, b).or_r2((**a).clone()),
                    (i, _) => {
                        let f = ctx[i - 2].clone();
                        let (cd, b) = parts(&f);
                        let (c, d) = parts(cd);
                        let rest = without(ctx, &f);
                        let db = Formula::implies(d.clone(), b.clone());
                        let t1 = self.build(&with(&rest, std::slice::from_ref(&db)), cd);
                        let mut r1 = rest.clone();
                        r1.push(db);
                        let t1 = ProofTree::cut(nested_lemma(c, d, b), fit(t1, &r1).unwrap());
                        let t2 = self.build(&with(&rest, std::slice::from_ref(b)), goal);
                        let mut r2 = rest;
                        r2.push(b.clone());
                        let t2 = fit(t2, &r2).unwrap();
                        ProofTree::imp_l(t1, t2, b)
                    }
                }
            }
        }
    }
}

/// `(c /\ d) -> b |- c -> d -> b`
fn curry_lemma(c: &Formula, d: &Formula, b: &Formula) -> ProofTree {
    let both = vec![c.clone(), d.clone()];
    let tc = fit(ProofTree::ax(c.clone()), &both).unwrap();
    let td = fit(ProofTree::ax(d.clone()), &both).unwrap();
    let cd = ProofTree::and_r(tc, td);
    ProofTree::imp_l(cd, ProofTree::ax(b.clone()), b)
        .imp_r(d)
        .imp_r(c)
}

/// `(c \/ d) -> b |- c -> b` (or `d -> b`).
fn disjunct_lemma(c: &Formula, d: &Formula, b: &Formula, left: bool) -> ProofTree {
    let (x, inj) = if left {
        (c, ProofTree::ax(c.clone()).or_r1(d.clone()))
    } else {
        (d, ProofTree::ax(d.clone()).or_r2(c.clone()))
    };
    ProofTree::imp_l(inj, ProofTree::ax(b.clone()), b).imp_r(x)
}

/// `(c -> d) -> b |- d -> b`
fn nested_lemma(c: &Formula, d: &Formula, b: &Formula) -> ProofTree {
    let dcd = ProofTree::ax(d.clone()).weaken_l(c.clone()).imp_r(c);
    ProofTree::imp_l(dcd, ProofTree::ax(b.clone()), b).imp_r(d)
}

/// Decides `s` and returns a witness, searching countermodels of up to six
/// worlds when refuted.
pub fn prove(s: &Sequent) -> Result<Verdict, IpcError> {
    Prover::new().prove_bounded(s, 6)
}

pub fn derivable(s: &Sequent) -> Result<bool, IpcError> {
    Prover::new().derivable(s)
}

pub fn equivalent(a: &Formula, b: &Formula) -> Result<bool, IpcError> {
    Prover::new().equivalent(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_tree, SchemaTheory};

    fn seq(s: &str) -> Sequent {
        Sequent::parse(s).unwrap()
    }

    fn proves(s: &str) -> bool {
        let v = prove(&seq(s)).unwrap();
        if let Witness::Proof(t) = &v.witness {
            check_tree(t, &SchemaTheory::empty()).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(t.conclusion.same_as(&seq(s)), "{s}: {}", t.conclusion);
        }
        v.provable
    }

    #[test]
    fn basics() {
        assert!(proves("|- P -> P"));
        assert!(!proves("|- P \\/ ~P"));
        assert!(!proves("~~X |- X"));
        assert!(proves("|- ~~(P \\/ ~P)"));
        assert!(proves("~~~Y |- ~Y"));
        assert!(proves("A /\\ B, (A \\/ C) -> D |- D /\\ B"));
        assert!(proves("(A /\\ B) -> C |- A -> B -> C"));
        assert!(!proves("|- ((P -> Q) -> P) -> P"));
    }

    #[test]
    fn monstrous_tautology() {
        assert!(proves(
            "|- ((P \\/ (P -> (Q \\/ ~Q))) -> (Q \\/ ~Q)) -> (P \\/ (P -> (Q \\/ ~Q)))"
        ));
    }

    #[test]
    fn nested_implication_tree() {
        assert!(proves("((A -> B) -> C), B |- C"));
        assert!(proves("~~(A -> B), A |- ~~B"));
    }

    #[test]
    fn refutation_has_countermodel() {
        let v = prove(&seq("|- P \\/ ~P")).unwrap();
        match v.witness {
            Witness::Countermodel { model, .. } => assert_eq!(model.worlds(), 2),
            other => panic!("expected countermodel, got {other:?}"),
        }
    }
}
