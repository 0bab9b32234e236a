//! Proof trees for the second-order sequent calculus, extended with axiom
//! schemas and a congruence rule for uninterpreted connectives, and the
//! checker that validates them node by node.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Signature, Variable};
use crate::sequent::{contains, multiset_eq, remove_one, Sequent};
use crate::syntax::{self, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "ax")]
    Ax,
    #[serde(rename = "cut")]
    Cut,
    #[serde(rename = "wL")]
    WeakenL,
    #[serde(rename = "cL")]
    ContractL,
    #[serde(rename = "wR")]
    WeakenR,
    #[serde(rename = "orL")]
    OrL,
    #[serde(rename = "orR1")]
    OrR1,
    #[serde(rename = "orR2")]
    OrR2,
    #[serde(rename = "andR")]
    AndR,
    #[serde(rename = "andL1")]
    AndL1,
    #[serde(rename = "andL2")]
    AndL2,
    #[serde(rename = "impL")]
    ImpL,
    #[serde(rename = "impR")]
    ImpR,
    #[serde(rename = "botL")]
    BotL,
    #[serde(rename = "forallL")]
    ForallL,
    #[serde(rename = "forallR")]
    ForallR,
    #[serde(rename = "existsR")]
    ExistsR,
    #[serde(rename = "existsL")]
    ExistsL,
    #[serde(rename = "schema")]
    Schema,
    #[serde(rename = "congruence")]
    Congruence,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::Cut => "cut",
            Rule::WeakenL => "wL",
            Rule::ContractL => "cL",
            Rule::WeakenR => "wR",
            Rule::OrL => "orL",
            Rule::OrR1 => "orR1",
            Rule::OrR2 => "orR2",
            Rule::AndR => "andR",
            Rule::AndL1 => "andL1",
            Rule::AndL2 => "andL2",
            Rule::ImpL => "impL",
            Rule::ImpR => "impR",
            Rule::BotL => "botL",
            Rule::ForallL => "forallL",
            Rule::ForallR => "forallR",
            Rule::ExistsR => "existsR",
            Rule::ExistsL => "existsL",
            Rule::Schema => "schema",
            Rule::Congruence => "congruence",
        }
    }

    fn arity(self) -> Option<usize> {
        Some(match self {
            Rule::Ax | Rule::BotL | Rule::Schema => 0,
            Rule::Cut | Rule::OrL | Rule::AndR | Rule::ImpL => 2,
            Rule::Congruence => return None,
            _ => 1,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extra information some rules need: the instantiating term of
/// `forallL`/`existsR`, an optional renamed eigenvariable for
/// `forallR`/`existsL`, or the schema instance.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum RuleData {
    #[default]
    None,
    Witness(Formula),
    Eigen(Variable),
    Schema {
        name: String,
        bindings: BTreeMap<Variable, Formula>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<ProofTree>,
    pub data: RuleData,
}

/// An axiom schema: a quantifier-free sequent whose free variables act as
/// metavariables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub template: Sequent,
}

/// Uninterpreted connectives together with their axiom schemas. The empty
/// theory is plain intuitionistic logic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemaTheory {
    pub signature: Signature,
    pub schemas: BTreeMap<String, Schema>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("schema `{0}` contains a quantifier")]
    QuantifiedSchema(String),
    #[error("schema `{0}` declared twice")]
    DuplicateSchema(String),
}

impl SchemaTheory {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_signature(signature: Signature) -> Self {
        SchemaTheory { signature, schemas: BTreeMap::new() }
    }

    pub fn add_schema(&mut self, name: &str, template: Sequent) -> Result<(), TheoryError> {
        if !template.is_quantifier_free() {
            return Err(TheoryError::QuantifiedSchema(name.to_string()));
        }
        if self.schemas.contains_key(name) {
            return Err(TheoryError::DuplicateSchema(name.to_string()));
        }
        self.schemas.insert(
            name.to_string(),
            Schema { name: name.to_string(), template },
        );
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.schemas.is_empty() && self.signature.connectives().next().is_none()
    }

    /// Whether `self` contains every connective and schema of `other`.
    pub fn extends(&self, other: &SchemaTheory) -> bool {
        self.signature.includes(&other.signature)
            && other
                .schemas
                .iter()
                .all(|(k, s)| self.schemas.get(k).map(|t| t.template == s.template) == Some(true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("malformed {rule} at {path}: expected {expected}")]
    MalformedRule {
        rule: Rule,
        path: String,
        expected: String,
    },
    #[error("side condition violated at {path}: variable {var} occurs free in the context")]
    SideConditionViolated { var: Variable, path: String },
}

impl KernelError {
    pub fn path(&self) -> &str {
        match self {
            KernelError::MalformedRule { path, .. } => path,
            KernelError::SideConditionViolated { path, .. } => path,
        }
    }
}

/// Summary of an accepted tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub nodes: usize,
    pub cuts: usize,
    pub schema_uses: usize,
}

/// Checks every node of `tree` against its rule template.
pub fn check_tree(tree: &ProofTree, theory: &SchemaTheory) -> Result<CheckReport, KernelError> {
    let mut report = CheckReport::default();
    check_node(tree, theory, "root", &mut report)?;
    Ok(report)
}

fn check_node(
    t: &ProofTree,
    theory: &SchemaTheory,
    path: &str,
    report: &mut CheckReport,
) -> Result<(), KernelError> {
    let bad = |expected: &str| KernelError::MalformedRule {
        rule: t.rule,
        path: path.to_string(),
        expected: expected.to_string(),
    };
    if let Some(n) = t.rule.arity() {
        if t.premises.len() != n {
            return Err(bad(&format!("{n} premise(s)")));
        }
    }
    report.nodes += 1;
    check_local(t, theory, path, report).map_err(|e| match e {
        Local::Bad(s) => bad(&s),
        Local::Side(var) => KernelError::SideConditionViolated {
            var,
            path: path.to_string(),
        },
    })?;
    for (i, p) in t.premises.iter().enumerate() {
        check_node(p, theory, &format!("{path}.{i}"), report)?;
    }
    Ok(())
}

enum Local {
    Bad(String),
    Side(Variable),
}

fn fail<T>(s: impl Into<String>) -> Result<T, Local> {
    Err(Local::Bad(s.into()))
}

fn ensure(cond: bool, expected: &str) -> Result<(), Local> {
    if cond {
        Ok(())
    } else {
        fail(expected)
    }
}

/// Candidate principal formulas: distinct hypotheses matching `pred`.
fn principals<'a>(
    hyps: &'a [Formula],
    pred: impl Fn(&Formula) -> bool + 'a,
) -> impl Iterator<Item = &'a Formula> + 'a {
    hyps.iter()
        .enumerate()
        .filter(move |(i, h)| pred(h) && !hyps[..*i].contains(h))
        .map(|(_, h)| h)
}

fn check_local(
    t: &ProofTree,
    theory: &SchemaTheory,
    _path: &str,
    report: &mut CheckReport,
) -> Result<(), Local> {
    let c = &t.conclusion;
    let p = &t.premises;
    match t.rule {
        Rule::Ax => ensure(
            c.hyps.len() == 1 && c.hyps[0].alpha_eq(&c.concl),
            "conclusion of the form phi |- phi",
        ),
        Rule::BotL => ensure(
            c.hyps.len() == 1 && c.hyps[0] == Formula::Bottom,
            "conclusion of the form bot |- phi",
        ),
        Rule::Cut => {
            report.cuts += 1;
            let phi = &p[0].conclusion.concl;
            let Some(rest) = remove_one(&p[1].conclusion.hyps, phi) else {
                return fail("right premise containing the cut formula as a hypothesis");
            };
            let mut hyps = p[0].conclusion.hyps.clone();
            hyps.extend(rest);
            ensure(
                multiset_eq(&hyps, &c.hyps) && p[1].conclusion.concl.alpha_eq(&c.concl),
                "conclusion Gamma, Delta |- psi from Gamma |- phi and Delta, phi |- psi",
            )
        }
        Rule::WeakenL => {
            let q = &p[0].conclusion;
            ensure(
                q.concl.alpha_eq(&c.concl)
                    && c.hyps.len() == q.hyps.len() + 1
                    && c.hyps.iter().any(|h| {
                        remove_one(&c.hyps, h).is_some_and(|r| multiset_eq(&r, &q.hyps))
                    }),
                "conclusion with exactly one extra hypothesis",
            )
        }
        Rule::ContractL => {
            let q = &p[0].conclusion;
            ensure(
                q.concl.alpha_eq(&c.concl)
                    && q.hyps.len() == c.hyps.len() + 1
                    && c.hyps.iter().any(|h| {
                        let mut more = c.hyps.clone();
                        more.push(h.clone());
                        multiset_eq(&more, &q.hyps)
                    }),
                "premise with one duplicated hypothesis",
            )
        }
        Rule::WeakenR => {
            let q = &p[0].conclusion;
            ensure(
                q.concl == Formula::Bottom && multiset_eq(&q.hyps, &c.hyps),
                "premise Gamma |- bot with the same hypotheses",
            )
        }
        Rule::OrR1 | Rule::OrR2 => {
            let q = &p[0].conclusion;
            let Formula::Or(a, b) = &c.concl else {
                return fail("a disjunction on the right");
            };
            let side = if t.rule == Rule::OrR1 { a } else { b };
            ensure(
                q.concl.alpha_eq(side) && multiset_eq(&q.hyps, &c.hyps),
                "premise proving the chosen disjunct from the same hypotheses",
            )
        }
        Rule::AndR => {
            let Formula::And(a, b) = &c.concl else {
                return fail("a conjunction on the right");
            };
            let (l, r) = (&p[0].conclusion, &p[1].conclusion);
            ensure(
                l.concl.alpha_eq(a)
                    && r.concl.alpha_eq(b)
                    && multiset_eq(&l.hyps, &c.hyps)
                    && multiset_eq(&r.hyps, &c.hyps),
                "premises proving each conjunct from the same hypotheses",
            )
        }
        Rule::ImpR => {
            let Formula::Implies(a, b) = &c.concl else {
                return fail("an implication on the right");
            };
            let q = &p[0].conclusion;
            ensure(
                q.concl.alpha_eq(b) && multiset_eq(&q.hyps, &c.with_hyp((**a).clone()).hyps),
                "premise Gamma, phi |- psi",
            )
        }
        Rule::AndL1 | Rule::AndL2 => {
            let q = &p[0].conclusion;
            ensure(q.concl.alpha_eq(&c.concl), "premise with the same conclusion")?;
            let ok = principals(&c.hyps, |h| matches!(h, Formula::And(..))).any(|h| {
                let Formula::And(a, b) = h else { return false };
                let part = if t.rule == Rule::AndL1 { a } else { b };
                let mut hyps = remove_one(&c.hyps, h).unwrap();
                hyps.push((**part).clone());
                multiset_eq(&hyps, &q.hyps)
            });
            ensure(ok, "a conjunction hypothesis replaced by its conjunct in the premise")
        }
        Rule::OrL => {
            let (l, r) = (&p[0].conclusion, &p[1].conclusion);
            ensure(
                l.concl.alpha_eq(&c.concl) && r.concl.alpha_eq(&c.concl),
                "premises with the same conclusion",
            )?;
            let ok = principals(&c.hyps, |h| matches!(h, Formula::Or(..))).any(|h| {
                let Formula::Or(a, b) = h else { return false };
                let rest = remove_one(&c.hyps, h).unwrap();
                let mut la = rest.clone();
                la.push((**a).clone());
                let mut rb = rest;
                rb.push((**b).clone());
                multiset_eq(&la, &l.hyps) && multiset_eq(&rb, &r.hyps)
            });
            ensure(ok, "a disjunction hypothesis split across the two premises")
        }
        Rule::ImpL => {
            let (l, r) = (&p[0].conclusion, &p[1].conclusion);
            ensure(r.concl.alpha_eq(&c.concl), "right premise with the same conclusion")?;
            let ok = principals(&c.hyps, |h| matches!(h, Formula::Implies(..))).any(|h| {
                let Formula::Implies(a, b) = h else { return false };
                if !l.concl.alpha_eq(a) {
                    return false;
                }
                let Some(delta) = remove_one(&r.hyps, b) else { return false };
                let mut hyps = l.hyps.clone();
                hyps.extend(delta);
                hyps.push(h.clone());
                multiset_eq(&hyps, &c.hyps)
            });
            ensure(ok, "Gamma, Delta, phi -> psi |- theta from Gamma |- phi and Delta, psi |- theta")
        }
        Rule::ForallL => {
            let RuleData::Witness(w) = &t.data else {
                return fail("an instantiating term");
            };
            let q = &p[0].conclusion;
            ensure(q.concl.alpha_eq(&c.concl), "premise with the same conclusion")?;
            let ok = principals(&c.hyps, |h| matches!(h, Formula::Forall(..))).any(|h| {
                let Formula::Forall(x, body) = h else { return false };
                let mut hyps = remove_one(&c.hyps, h).unwrap();
                hyps.push(body.subst1(x, w));
                multiset_eq(&hyps, &q.hyps)
            });
            ensure(ok, "a universal hypothesis instantiated in the premise")
        }
        Rule::ExistsR => {
            let RuleData::Witness(w) = &t.data else {
                return fail("a witness term");
            };
            let Formula::Exists(x, body) = &c.concl else {
                return fail("an existential on the right");
            };
            let q = &p[0].conclusion;
            ensure(
                q.concl.alpha_eq(&body.subst1(x, w)) && multiset_eq(&q.hyps, &c.hyps),
                "premise proving the instantiated body",
            )
        }
        Rule::ForallR => {
            let Formula::Forall(x, body) = &c.concl else {
                return fail("a universal on the right");
            };
            let q = &p[0].conclusion;
            let (eigen, inst) = eigen_instance(&t.data, x, body, &c.concl)?;
            ensure(
                q.concl.alpha_eq(&inst) && multiset_eq(&q.hyps, &c.hyps),
                "premise proving the body",
            )?;
            if c.hyps.iter().any(|h| h.occurs_free(&eigen)) {
                return Err(Local::Side(eigen));
            }
            Ok(())
        }
        Rule::ExistsL => {
            let q = &p[0].conclusion;
            ensure(q.concl.alpha_eq(&c.concl), "premise with the same conclusion")?;
            let mut side = None;
            for h in principals(&c.hyps, |h| matches!(h, Formula::Exists(..))) {
                let Formula::Exists(x, body) = h else { continue };
                let (eigen, inst) = eigen_instance(&t.data, x, body, h)?;
                let rest = remove_one(&c.hyps, h).unwrap();
                let mut hyps = rest.clone();
                hyps.push(inst);
                if multiset_eq(&hyps, &q.hyps) {
                    if rest.iter().any(|g| g.occurs_free(&eigen)) || c.concl.occurs_free(&eigen) {
                        side = Some(eigen);
                        continue;
                    }
                    return Ok(());
                }
            }
            match side {
                Some(v) => Err(Local::Side(v)),
                None => fail("an existential hypothesis opened in the premise"),
            }
        }
        Rule::Schema => {
            report.schema_uses += 1;
            let RuleData::Schema { name, bindings } = &t.data else {
                return fail("a schema instantiation");
            };
            let Some(s) = theory.schemas.get(name) else {
                return fail(format!("schema `{name}` of the theory in force"));
            };
            let inst = s.template.substitute(bindings);
            ensure(inst.same_as(c), &format!("an instance of schema `{name}`"))
        }
        Rule::Congruence => {
            let Formula::App(name, rhs) = &c.concl else {
                return fail("a connective application on the right");
            };
            if theory.signature.arity(name) != Some(rhs.len()) {
                return fail(format!("connective `{name}` declared in the theory"));
            }
            ensure(p.len() == rhs.len(), "one premise per argument")?;
            let ok = principals(&c.hyps, |h| matches!(h, Formula::App(n, _) if n == name)).any(|h| {
                let Formula::App(_, lhs) = h else { return false };
                let gamma = remove_one(&c.hyps, h).unwrap();
                lhs.iter().zip(rhs.iter()).zip(p.iter()).all(|((a, b), prem)| {
                    prem.conclusion.concl.alpha_eq(&Formula::iff(a.clone(), b.clone()))
                        && multiset_eq(&prem.conclusion.hyps, &gamma)
                })
            });
            ensure(ok, "premises Gamma |- P_i <-> P_i' for c(P) |- c(P')")
        }
    }
}

fn eigen_instance(
    data: &RuleData,
    x: &Variable,
    body: &Formula,
    whole: &Formula,
) -> Result<(Variable, Formula), Local> {
    match data {
        RuleData::None => Ok((x.clone(), (*body).clone())),
        RuleData::Eigen(z) => {
            if z != x && whole.occurs_free(z) {
                return Err(Local::Side(z.clone()));
            }
            Ok((z.clone(), body.subst1(x, &Formula::Var(z.clone()))))
        }
        _ => fail("an eigenvariable or no rule data"),
    }
}

// ---------------------------------------------------------------------------
// Builders. They compute conclusions without checking; run `check_tree` on
// the finished tree.

impl ProofTree {
    fn node(rule: Rule, conclusion: Sequent, premises: Vec<ProofTree>) -> Self {
        ProofTree { rule, conclusion, premises, data: RuleData::None }
    }

    pub fn hyps(&self) -> &[Formula] {
        &self.conclusion.hyps
    }

    pub fn concl(&self) -> &Formula {
        &self.conclusion.concl
    }

    pub fn ax(f: Formula) -> Self {
        Self::node(Rule::Ax, Sequent::new(vec![f.clone()], f), vec![])
    }

    pub fn bot_l(c: Formula) -> Self {
        Self::node(Rule::BotL, Sequent::new(vec![Formula::Bottom], c), vec![])
    }

    pub fn weaken_l(self, f: Formula) -> Self {
        let s = self.conclusion.with_hyp(f);
        Self::node(Rule::WeakenL, s, vec![self])
    }

    /// Weakens by every formula in `extra`, in order.
    pub fn weaken_all(self, extra: impl IntoIterator<Item = Formula>) -> Self {
        extra.into_iter().fold(self, ProofTree::weaken_l)
    }

    pub fn contract_l(self, f: &Formula) -> Self {
        let hyps = remove_one(&self.conclusion.hyps, f).expect("contracted formula present");
        let s = Sequent::new(hyps, self.conclusion.concl.clone());
        Self::node(Rule::ContractL, s, vec![self])
    }

    pub fn weaken_r(self, c: Formula) -> Self {
        let s = Sequent::new(self.conclusion.hyps.clone(), c);
        Self::node(Rule::WeakenR, s, vec![self])
    }

    pub fn or_r1(self, right: Formula) -> Self {
        let s = Sequent::new(
            self.conclusion.hyps.clone(),
            Formula::or(self.conclusion.concl.clone(), right),
        );
        Self::node(Rule::OrR1, s, vec![self])
    }

    pub fn or_r2(self, left: Formula) -> Self {
        let s = Sequent::new(
            self.conclusion.hyps.clone(),
            Formula::or(left, self.conclusion.concl.clone()),
        );
        Self::node(Rule::OrR2, s, vec![self])
    }

    pub fn and_r(l: ProofTree, r: ProofTree) -> Self {
        let s = Sequent::new(
            l.conclusion.hyps.clone(),
            Formula::and(l.conclusion.concl.clone(), r.conclusion.concl.clone()),
        );
        Self::node(Rule::AndR, s, vec![l, r])
    }

    /// Replaces hypothesis `a` by `a /\ b`.
    pub fn and_l1(self, a: &Formula, b: Formula) -> Self {
        let mut hyps = remove_one(&self.conclusion.hyps, a).expect("conjunct present");
        hyps.push(Formula::and(a.clone(), b));
        let s = Sequent::new(hyps, self.conclusion.concl.clone());
        Self::node(Rule::AndL1, s, vec![self])
    }

    /// Replaces hypothesis `b` by `a /\ b`.
    pub fn and_l2(self, a: Formula, b: &Formula) -> Self {
        let mut hyps = remove_one(&self.conclusion.hyps, b).expect("conjunct present");
        hyps.push(Formula::and(a, b.clone()));
        let s = Sequent::new(hyps, self.conclusion.concl.clone());
        Self::node(Rule::AndL2, s, vec![self])
    }

    /// From `Gamma, a |- c` and `Gamma, b |- c` derive `Gamma, a \/ b |- c`.
    pub fn or_l(l: ProofTree, r: ProofTree, a: &Formula, b: &Formula) -> Self {
        let mut hyps = remove_one(&l.conclusion.hyps, a).expect("left disjunct present");
        hyps.push(Formula::or(a.clone(), b.clone()));
        let s = Sequent::new(hyps, l.conclusion.concl.clone());
        Self::node(Rule::OrL, s, vec![l, r])
    }

    /// From `Gamma |- a` and `Delta, b |- c` derive `Gamma, Delta, a -> b |- c`.
    pub fn imp_l(l: ProofTree, r: ProofTree, b: &Formula) -> Self {
        let a = l.conclusion.concl.clone();
        let mut hyps = l.conclusion.hyps.clone();
        hyps.extend(remove_one(&r.conclusion.hyps, b).expect("consequent present"));
        hyps.push(Formula::implies(a, b.clone()));
        let s = Sequent::new(hyps, r.conclusion.concl.clone());
        Self::node(Rule::ImpL, s, vec![l, r])
    }

    pub fn imp_r(self, a: &Formula) -> Self {
        let hyps = remove_one(&self.conclusion.hyps, a).expect("antecedent present");
        let s = Sequent::new(
            hyps,
            Formula::implies(a.clone(), self.conclusion.concl.clone()),
        );
        Self::node(Rule::ImpR, s, vec![self])
    }

    /// Cuts the conclusion of `l` against the hypotheses of `r`.
    pub fn cut(l: ProofTree, r: ProofTree) -> Self {
        let phi = l.conclusion.concl.clone();
        let mut hyps = l.conclusion.hyps.clone();
        hyps.extend(remove_one(&r.conclusion.hyps, &phi).expect("cut formula present"));
        let s = Sequent::new(hyps, r.conclusion.concl.clone());
        Self::node(Rule::Cut, s, vec![l, r])
    }

    pub fn exists_r(self, x: Variable, body: Formula, witness: Formula) -> Self {
        let s = Sequent::new(self.conclusion.hyps.clone(), Formula::exists(x, body));
        ProofTree {
            rule: Rule::ExistsR,
            conclusion: s,
            premises: vec![self],
            data: RuleData::Witness(witness),
        }
    }

    pub fn forall_r(self, x: Variable) -> Self {
        let s = Sequent::new(
            self.conclusion.hyps.clone(),
            Formula::forall(x, self.conclusion.concl.clone()),
        );
        Self::node(Rule::ForallR, s, vec![self])
    }

    /// Replaces hypothesis `body[witness/x]` by `forall x. body`.
    pub fn forall_l(self, x: Variable, body: Formula, witness: Formula) -> Self {
        let inst = body.subst1(&x, &witness);
        let mut hyps = remove_one(&self.conclusion.hyps, &inst).expect("instance present");
        hyps.push(Formula::forall(x, body));
        ProofTree {
            rule: Rule::ForallL,
            conclusion: Sequent::new(hyps, self.conclusion.concl.clone()),
            premises: vec![self],
            data: RuleData::Witness(witness),
        }
    }

    /// Replaces hypothesis `body` by `exists x. body`.
    pub fn exists_l(self, x: Variable, body: Formula) -> Self {
        let mut hyps = remove_one(&self.conclusion.hyps, &body).expect("body present");
        hyps.push(Formula::exists(x, body));
        Self::node(Rule::ExistsL, Sequent::new(hyps, self.conclusion.concl.clone()), vec![self])
    }

    pub fn schema(name: &str, bindings: BTreeMap<Variable, Formula>, conclusion: Sequent) -> Self {
        ProofTree {
            rule: Rule::Schema,
            conclusion,
            premises: vec![],
            data: RuleData::Schema { name: name.to_string(), bindings },
        }
    }

    pub fn congruence(premises: Vec<ProofTree>, name: &str, lhs: Vec<Formula>, rhs: Vec<Formula>) -> Self {
        let gamma = premises
            .first()
            .map(|p| p.conclusion.hyps.clone())
            .unwrap_or_default();
        let mut hyps = gamma;
        hyps.push(Formula::app(name, lhs));
        Self::node(
            Rule::Congruence,
            Sequent::new(hyps, Formula::app(name, rhs)),
            premises,
        )
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::depth).max().unwrap_or(0)
    }

    pub fn uses_rule(&self, rule: Rule) -> bool {
        self.rule == rule || self.premises.iter().any(|p| p.uses_rule(rule))
    }

    /// Replaces every free occurrence of the given atoms throughout the tree.
    /// Valid for trees without quantifier rules whose eigenvariables could be
    /// captured; used to re-expand atomized propositional proofs.
    pub fn substitute(&self, bindings: &BTreeMap<Variable, Formula>) -> ProofTree {
        ProofTree {
            rule: self.rule,
            conclusion: self.conclusion.substitute(bindings),
            premises: self.premises.iter().map(|p| p.substitute(bindings)).collect(),
            data: match &self.data {
                RuleData::Witness(w) => RuleData::Witness(w.substitute(bindings)),
                RuleData::Schema { name, bindings: b } => RuleData::Schema {
                    name: name.clone(),
                    bindings: b.iter().map(|(k, v)| (k.clone(), v.substitute(bindings))).collect(),
                },
                other => other.clone(),
            },
        }
    }
}

/// One node per line, premises indented below their conclusion.
impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &ProofTree, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}{}  [{}", "", t.conclusion, t.rule, indent = 2 * depth)?;
            match &t.data {
                RuleData::None => {}
                RuleData::Witness(w) => write!(f, " {w}")?,
                RuleData::Eigen(v) => write!(f, " {v}")?,
                RuleData::Schema { name, .. } => write!(f, " {name}")?,
            }
            writeln!(f, "]")?;
            t.premises.iter().try_for_each(|p| go(p, depth + 1, f))
        }
        go(self, 0, f)
    }
}

/// Adjusts a tree proving `Gamma |- c` to prove `target |- c`, where every
/// distinct hypothesis of `Gamma` occurs in `target`: surplus copies are
/// contracted and missing hypotheses weakened in.
pub fn fit(tree: ProofTree, target: &[Formula]) -> Option<ProofTree> {
    let mut t = tree;
    // contract duplicates that exceed the target's multiplicity
    loop {
        let hyps = t.conclusion.hyps.clone();
        let mut changed = false;
        for h in &hyps {
            let have = hyps.iter().filter(|g| *g == h).count();
            let want = target.iter().filter(|g| *g == h).count();
            if want == 0 && !contains(target, h) {
                return None;
            }
            if have > want.max(1) {
                t = t.contract_l(h);
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    let mut missing = target.to_vec();
    for h in &t.conclusion.hyps {
        {
            let m = remove_one(&missing, h)?;
            missing = m
        }
    }
    Some(t.weaken_all(missing))
}

// ---------------------------------------------------------------------------
// JSON form: formulas as strings in the concrete syntax.

#[derive(Serialize, Deserialize)]
struct TreeJson {
    rule: Rule,
    conclusion: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<TreeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    bindings: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum TreeFormatError {
    #[error("invalid proof-tree JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in proof tree: {0}")]
    Parse(#[from] ParseError),
    #[error("bad eigenvariable name `{0}`")]
    BadVariable(String),
}

impl ProofTree {
    fn to_json_value(&self) -> TreeJson {
        let (witness, eigen, schema, bindings) = match &self.data {
            RuleData::None => (None, None, None, BTreeMap::new()),
            RuleData::Witness(w) => (Some(w.to_string()), None, None, BTreeMap::new()),
            RuleData::Eigen(v) => (None, Some(v.to_string()), None, BTreeMap::new()),
            RuleData::Schema { name, bindings } => (
                None,
                None,
                Some(name.clone()),
                bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            ),
        };
        TreeJson {
            rule: self.rule,
            conclusion: self.conclusion.to_string(),
            premises: self.premises.iter().map(ProofTree::to_json_value).collect(),
            witness,
            eigen,
            schema,
            bindings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("tree serializes")
    }

    pub fn to_json_value_untyped(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_value()).expect("tree serializes")
    }

    pub fn from_json(text: &str, sig: &Signature) -> Result<ProofTree, TreeFormatError> {
        let raw: TreeJson = serde_json::from_str(text)?;
        Self::from_json_value(raw, sig)
    }

    fn from_json_value(raw: TreeJson, sig: &Signature) -> Result<ProofTree, TreeFormatError> {
        let conclusion = Sequent::parse_in(&raw.conclusion, sig)?;
        let data = if let Some(name) = raw.schema {
            let mut bindings = BTreeMap::new();
            for (k, v) in raw.bindings {
                bindings.insert(Variable::new(k), syntax::parse_formula_in(&v, sig)?);
            }
            RuleData::Schema { name, bindings }
        } else if let Some(w) = raw.witness {
            RuleData::Witness(syntax::parse_formula_in(&w, sig)?)
        } else if let Some(e) = raw.eigen {
            if !Variable::is_identifier(&e) {
                return Err(TreeFormatError::BadVariable(e));
            }
            RuleData::Eigen(Variable::new(e))
        } else {
            RuleData::None
        };
        let premises = raw
            .premises
            .into_iter()
            .map(|p| Self::from_json_value(p, sig))
            .collect::<Result<_, _>>()?;
        Ok(ProofTree { rule: raw.rule, conclusion, premises, data })
    }
}

// ---------------------------------------------------------------------------
// Extensionality.

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionalityError {
    #[error("variable {0} is free in a replacement formula and bound in the context")]
    VariableClash(Variable),
    #[error("connective `{0}` is not declared in the theory")]
    UndeclaredConnective(String),
}

/// Builds a proof of `p -> p', p' -> p, context[p/hole] |- context[p'/hole]`
/// by induction on the context. Connective applications are crossed with
/// one `congruence` step, which needs a theory declaring the connective.
pub fn derive_extensionality(
    context: &Formula,
    hole: &Variable,
    p: &Formula,
    p2: &Formula,
) -> Result<ProofTree, ExtensionalityError> {
    let bound = context.bound_vars();
    for v in p.free_vars().iter().chain(p2.free_vars().iter()) {
        if bound.contains(v) {
            return Err(ExtensionalityError::VariableClash(v.clone()));
        }
    }
    let fwd = Formula::implies(p.clone(), p2.clone());
    let bwd = Formula::implies(p2.clone(), p.clone());
    let ext = Ext { hole, p, p2, fwd: &fwd, bwd: &bwd };
    Ok(ext.forward(context))
}

struct Ext<'a> {
    hole: &'a Variable,
    p: &'a Formula,
    p2: &'a Formula,
    fwd: &'a Formula,
    bwd: &'a Formula,
}

impl Ext<'_> {
    fn pair(&self) -> [Formula; 2] {
        [self.fwd.clone(), self.bwd.clone()]
    }

    fn flipped<'b>(&'b self) -> Ext<'b> {
        Ext { hole: self.hole, p: self.p2, p2: self.p, fwd: self.bwd, bwd: self.fwd }
    }

    /// `fwd, bwd, x[p] |- x[p']`, hypotheses exactly in that multiset.
    fn forward(&self, x: &Formula) -> ProofTree {
        let before = x.plug(self.hole, self.p);
        let after = x.plug(self.hole, self.p2);
        let target = {
            let mut h = self.pair().to_vec();
            h.push(before.clone());
            h
        };
        if !x.occurs_free(self.hole) {
            return ProofTree::ax(before).weaken_all(self.pair());
        }
        let t = match x {
            Formula::Var(_) => {
                // p, p -> p' |- p'
                let t = ProofTree::imp_l(ProofTree::ax(self.p.clone()), ProofTree::ax(self.p2.clone()), self.p2);
                t.weaken_l(self.bwd.clone())
            }
            Formula::And(a, b) => {
                let ta = self.forward(a).and_l1(&a.plug(self.hole, self.p), b.plug(self.hole, self.p));
                let tb = self.forward(b).and_l2(a.plug(self.hole, self.p), &b.plug(self.hole, self.p));
                ProofTree::and_r(ta, fit(tb, &target).unwrap())
            }
            Formula::Or(a, b) => {
                let ta = self.forward(a).or_r1(b.plug(self.hole, self.p2));
                let tb = self.forward(b).or_r2(a.plug(self.hole, self.p2));
                ProofTree::or_l(ta, tb, &a.plug(self.hole, self.p), &b.plug(self.hole, self.p))
            }
            Formula::Implies(a, b) => {
                // fwd, bwd, a[p'] |- a[p]   and   fwd, bwd, b[p] |- b[p']
                let a2 = a.plug(self.hole, self.p2);
                let b1 = b.plug(self.hole, self.p);
                let back = self.flipped().forward(a);
                let back = fit(back, &[self.fwd.clone(), self.bwd.clone(), a2.clone()]).unwrap();
                let fwd_b = self.forward(b);
                // fwd, bwd, a[p'], fwd, bwd, a[p] -> b[p] |- b[p']
                let t = ProofTree::imp_l(back, fwd_b, &b1);
                let t = t.contract_l(self.fwd).contract_l(self.bwd);
                t.imp_r(&a2)
            }
            Formula::Exists(v, body) => {
                let inner = self.forward(body);
                let inner = inner.exists_r(v.clone(), body.plug(self.hole, self.p2), Formula::Var(v.clone()));
                inner.exists_l(v.clone(), body.plug(self.hole, self.p))
            }
            Formula::Forall(v, body) => {
                let inner = self.forward(body);
                let inner = inner.forall_l(v.clone(), body.plug(self.hole, self.p), Formula::Var(v.clone()));
                inner.forall_r(v.clone())
            }
            Formula::App(name, args) => {
                let gamma: Vec<Formula> = self.pair().to_vec();
                let premises = args
                    .iter()
                    .map(|a| {
                        let l = self.forward(a).imp_r(&a.plug(self.hole, self.p));
                        let r = self.flipped().forward(a);
                        let r = fit(r, &[self.fwd.clone(), self.bwd.clone(), a.plug(self.hole, self.p2)]).unwrap();
                        let r = r.imp_r(&a.plug(self.hole, self.p2));
                        ProofTree::and_r(fit(l, &gamma).unwrap(), fit(r, &gamma).unwrap())
                    })
                    .collect();
                ProofTree::congruence(
                    premises,
                    name,
                    args.iter().map(|a| a.plug(self.hole, self.p)).collect(),
                    args.iter().map(|a| a.plug(self.hole, self.p2)).collect(),
                )
            }
            Formula::Bottom => unreachable!("hole occurs"),
        };
        debug_assert!(t.concl().alpha_eq(&after));
        fit(t, &target).expect("extensionality hypotheses line up")
    }
}
