//! Second-order definable connectives `exists Y. body` and their
//! quantifier-free auxiliary formulas.

use serde::Serialize;

use crate::formula::{Formula, Variable};
use crate::ipc::{Prover, Witness};
use crate::kernel::{check_tree, ProofTree, Rule, SchemaTheory};
use crate::pitts::pite_exists;
use crate::sequent::Sequent;

use super::LabError;

/// The connective `exists var. body`, where `body` is propositional.
/// Its parameters are the remaining free atoms of `body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularConnective {
    pub body: Formula,
    pub var: Variable,
}

impl RegularConnective {
    pub fn new(body: Formula, var: Variable) -> Result<Self, LabError> {
        if !body.is_propositional() {
            return Err(LabError::InvalidBody(body.to_string()));
        }
        Ok(RegularConnective { body, var })
    }

    pub fn params(&self) -> Vec<Variable> {
        self.body.free_vars().into_iter().filter(|v| *v != self.var).collect()
    }

    /// `exists var. body` as a formula.
    pub fn formula(&self) -> Formula {
        Formula::exists(self.var.clone(), self.body.clone())
    }

    /// The quantifier-free equivalent of the connective.
    pub fn interpolant(&self) -> Result<Formula, LabError> {
        Ok(pite_exists(&self.body, &self.var)?)
    }

    pub fn instance(&self, candidate: &Formula) -> Formula {
        self.body.subst1(&self.var, candidate)
    }
}

/// Result of testing whether `body[candidate/var]` is equivalent to the
/// connective.
#[derive(Clone, Debug)]
pub struct AuxiliaryReport {
    pub connective: Formula,
    pub interpolant: Formula,
    pub candidate: Formula,
    pub holds: bool,
    /// `body[candidate/var]`.
    pub definition: Formula,
    /// When `holds`: kernel-checked trees for `exists var. body |- interpolant`
    /// and `interpolant |- exists var. body`, the latter by `existsR` with
    /// the candidate as witness.
    pub certificates: Vec<ProofTree>,
}

#[derive(Serialize)]
struct ReportJson {
    connective: String,
    interpolant: String,
    candidate: String,
    holds: bool,
    definition: String,
    certificates: Vec<CertificateJson>,
}

#[derive(Serialize)]
struct CertificateJson {
    sequent: String,
    nodes: usize,
    checked: bool,
}

impl AuxiliaryReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let certificates = self
            .certificates
            .iter()
            .map(|t| CertificateJson {
                sequent: t.conclusion.to_string(),
                nodes: t.size(),
                checked: check_tree(t, &SchemaTheory::empty()).is_ok(),
            })
            .collect();
        serde_json::to_value(ReportJson {
            connective: self.connective.to_string(),
            interpolant: self.interpolant.to_string(),
            candidate: self.candidate.to_string(),
            holds: self.holds,
            definition: self.definition.to_string(),
            certificates,
        })
        .expect("report serializes")
    }
}

fn prove(prover: &Prover, s: Sequent) -> Result<Option<ProofTree>, LabError> {
    let v = prover.prove_bounded(&s, 1)?;
    Ok(match v.witness {
        Witness::Proof(t) => Some(t),
        _ => None,
    })
}

/// Decides whether `candidate`, a formula over the parameters of `c`, is
/// an auxiliary formula: `body[candidate/var]` must be equivalent to
/// `exists var. body`.
pub fn is_auxiliary(c: &RegularConnective, candidate: &Formula) -> Result<AuxiliaryReport, LabError> {
    if !candidate.is_propositional() {
        return Err(LabError::InvalidBody(candidate.to_string()));
    }
    let params = c.params();
    if let Some(x) = candidate.free_vars().into_iter().find(|x| !params.contains(x)) {
        return Err(LabError::ForeignVariable(x.to_string()));
    }
    let prover = Prover::new();
    let e = c.interpolant()?;
    let definition = c.instance(candidate);
    let mut holds = true;
    let mut certificates = Vec::new();
    if holds {
        // body[candidate/var] |- E always holds; the converse is the content
        let down = prove(&prover, Sequent::new(vec![c.body.clone()], e.clone()))?;
        let up = prove(&prover, Sequent::new(vec![e.clone()], definition.clone()))?;
        match (down, up) {
            (Some(down), Some(up)) => {
                let down = down.exists_l(c.var.clone(), c.body.clone());
                let up = up.exists_r(c.var.clone(), c.body.clone(), candidate.clone());
                for t in [&down, &up] {
                    check_tree(t, &SchemaTheory::empty())?;
                }
                certificates = vec![down, up];
            }
            _ => holds = false,
        }
    }
    Ok(AuxiliaryReport {
        connective: c.formula(),
        interpolant: e,
        candidate: candidate.clone(),
        holds,
        definition,
        certificates,
    })
}

/// Candidate read off a cut-free proof, with the rules walked to find it.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub candidate: Formula,
    pub path: Vec<Rule>,
    pub report: AuxiliaryReport,
}

const PREFIX: [Rule; 4] = [Rule::AndL1, Rule::AndL2, Rule::WeakenL, Rule::ContractL];

/// Reads a candidate auxiliary formula off a cut-free proof of
/// `Gamma |- exists var. body`. Left conjunction, weakening and
/// contraction steps are skipped; an `impL` is crossed through its right
/// premise; the walk stops at `wR` (candidate `bot`) or `existsR` (its
/// witness). The candidate is then tested with [`is_auxiliary`].
pub fn extract_auxiliary(tree: &ProofTree, c: &RegularConnective) -> Result<Extraction, LabError> {
    check_tree(tree, &SchemaTheory::empty())?;
    if tree.uses_rule(Rule::Cut) {
        return Err(LabError::NotCutFree);
    }
    let goal = c.formula();
    if !tree.concl().alpha_eq(&goal) {
        return Err(LabError::WrongConclusion {
            expected: goal.to_string(),
            found: tree.concl().to_string(),
        });
    }
    let mut path = Vec::new();
    let mut node = tree;
    let candidate = loop {
        path.push(node.rule);
        match node.rule {
            r if PREFIX.contains(&r) => node = &node.premises[0],
            Rule::ImpL => node = &node.premises[1],
            Rule::WeakenR => break Formula::Bottom,
            Rule::ExistsR => match &node.data {
                crate::kernel::RuleData::Witness(w) => break w.clone(),
                _ => unreachable!("checked existsR carries a witness"),
            },
            Rule::OrL => return Err(LabError::DisjunctionNeeded),
            r => return Err(LabError::NoEligibleRule(r.name().to_string())),
        }
    };
    let report = is_auxiliary(c, &candidate)?;
    Ok(Extraction { candidate, path, report })
}

/// Cut-free trees shipped with the library, each with the connective it
/// proves an instance of.
pub fn bundled_trees() -> Vec<(&'static str, RegularConnective, ProofTree)> {
    vec![
        ("weaken-right", weaken_right_connective(), weaken_right_tree()),
        ("exists-right", exists_right_connective(), exists_right_tree()),
        ("imp-left", imp_left_connective(), imp_left_tree()),
    ]
}

fn v(name: &str) -> Formula {
    Formula::var(name)
}

fn y() -> Variable {
    Variable::new("Y")
}

/// `exists Y. (X /\ ~X) /\ Y`
pub fn weaken_right_connective() -> RegularConnective {
    let body = Formula::and(Formula::and(v("X"), Formula::not(v("X"))), v("Y"));
    RegularConnective { body, var: y() }
}

/// `X /\ ~X |- exists Y. (X /\ ~X) /\ Y`, ending in `wR`.
pub fn weaken_right_tree() -> ProofTree {
    let c = weaken_right_connective();
    let (x, nx) = (v("X"), Formula::not(v("X")));
    let refute = ProofTree::imp_l(ProofTree::ax(x.clone()), ProofTree::bot_l(Formula::Bottom), &Formula::Bottom);
    let both = Formula::and(x.clone(), nx.clone());
    let t = refute
        .and_l1(&x, nx.clone())
        .and_l2(x.clone(), &nx)
        .contract_l(&both);
    t.weaken_r(c.formula())
}

/// `exists Y. (Y \/ ~Y) -> P /\ Q`
pub fn exists_right_connective() -> RegularConnective {
    let yy = v("Y");
    let body = Formula::implies(Formula::or(yy.clone(), Formula::not(yy)), Formula::and(v("P"), v("Q")));
    RegularConnective { body, var: y() }
}

/// `~~(P /\ Q) |- exists Y. (Y \/ ~Y) -> P /\ Q`, ending in `existsR`
/// with witness `P /\ Q`.
pub fn exists_right_tree() -> ProofTree {
    let c = exists_right_connective();
    let a = Formula::and(v("P"), v("Q"));
    let na = Formula::not(a.clone());
    let nna = Formula::not(na.clone());
    let left = ProofTree::ax(a.clone()).weaken_l(nna.clone());
    let right = ProofTree::imp_l(ProofTree::ax(na.clone()), ProofTree::bot_l(a.clone()), &Formula::Bottom);
    let t = ProofTree::or_l(left, right, &a, &na).imp_r(&Formula::or(a.clone(), na));
    t.exists_r(c.var.clone(), c.body.clone(), a)
}

/// `exists Y. X1 /\ (X1 -> Y) /\ (Y -> X2)`
pub fn imp_left_connective() -> RegularConnective {
    let (x1, x2, yy) = (v("X1"), v("X2"), v("Y"));
    let body = Formula::and(
        Formula::and(x1.clone(), Formula::implies(x1, yy.clone())),
        Formula::implies(yy, x2),
    );
    RegularConnective { body, var: y() }
}

/// `X1 /\ (X1 -> X2) |- exists Y. X1 /\ (X1 -> Y) /\ (Y -> X2)`: the
/// hypothesis is split, `X1 -> X2` is used by `impL`, and the right
/// premise ends in `existsR` with witness `X2`.
pub fn imp_left_tree() -> ProofTree {
    let c = imp_left_connective();
    let (x1, x2) = (v("X1"), v("X2"));
    let imp = Formula::implies(x1.clone(), x2.clone());
    let inst = c.instance(&x2);
    // X1, X2 |- X1 /\ (X1 -> X2) /\ (X2 -> X2)
    let first = ProofTree::ax(x1.clone()).weaken_l(x2.clone());
    let second = ProofTree::ax(x2.clone()).weaken_l(x1.clone()).weaken_l(x1.clone()).imp_r(&x1);
    let third = ProofTree::ax(x2.clone()).weaken_l(x1.clone()).weaken_l(x2.clone()).imp_r(&x2);
    let body = ProofTree::and_r(ProofTree::and_r(first, second), third);
    debug_assert_eq!(body.concl(), &inst);
    let right = body.exists_r(c.var.clone(), c.body.clone(), x2.clone());
    let t = ProofTree::imp_l(ProofTree::ax(x1.clone()), right, &x2);
    let both = Formula::and(x1.clone(), imp.clone());
    t.contract_l(&x1)
        .and_l1(&x1, imp.clone())
        .and_l2(x1.clone(), &imp)
        .contract_l(&both)
}

/// Parses a connective body and variable for the command line and tests.
pub fn connective_from_text(body: &str, var: &str) -> Result<RegularConnective, LabError> {
    let f = crate::syntax::parse_formula(body).map_err(|e| LabError::InvalidBody(e.to_string()))?;
    if !Variable::is_identifier(var) {
        return Err(LabError::InvalidBody(format!("bad variable `{var}`")));
    }
    RegularConnective::new(f, Variable::new(var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipc::equivalent;
    use crate::syntax::parse_formula;

    #[test]
    fn bundled_trees_check_and_extract() {
        for (name, c, t) in bundled_trees() {
            check_tree(&t, &SchemaTheory::empty()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!t.uses_rule(Rule::Cut), "{name}");
            let ex = extract_auxiliary(&t, &c).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(ex.report.holds, "{name}: {}", ex.candidate);
            assert!(equivalent(&t.hyps()[0], &ex.report.interpolant).unwrap(), "{name}");
        }
    }

    #[test]
    fn candidates() {
        let got: Vec<String> = bundled_trees()
            .into_iter()
            .map(|(_, c, t)| extract_auxiliary(&t, &c).unwrap().candidate.to_string())
            .collect();
        assert_eq!(got, ["bot", "P /\\ Q", "X2"]);
    }

    #[test]
    fn non_auxiliary_candidate() {
        let c = exists_right_connective();
        let r = is_auxiliary(&c, &parse_formula("P").unwrap()).unwrap();
        assert!(!r.holds);
        assert!(r.certificates.is_empty());
        assert!(matches!(
            is_auxiliary(&c, &parse_formula("Y").unwrap()),
            Err(LabError::ForeignVariable(_))
        ));
        let par = RegularConnective::new(parse_formula("(~Y -> X1) /\\ (~~Y -> X2)").unwrap(), y()).unwrap();
        assert!(!is_auxiliary(&par, &Formula::Bottom).unwrap().holds);
        let triv = RegularConnective::new(parse_formula("X").unwrap(), y()).unwrap();
        assert!(is_auxiliary(&triv, &Formula::Bottom).unwrap().holds);
    }

    #[test]
    fn tree_files_match_builders() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("trees");
        for (name, _, t) in bundled_trees() {
            let path = dir.join(format!("{name}.json"));
            if std::env::var_os("PITTSLAB_BLESS").is_some() {
                std::fs::write(&path, t.to_json() + "\n").unwrap();
            }
            let text = std::fs::read_to_string(&path).unwrap();
            let back = ProofTree::from_json(&text, &crate::formula::Signature::new()).unwrap();
            assert_eq!(back, t, "{name}");
        }
    }

    #[test]
    fn cut_is_rejected() {
        let c = exists_right_connective();
        let t = exists_right_tree();
        let h = t.hyps()[0].clone();
        let with_cut = ProofTree::cut(ProofTree::ax(h), t);
        assert!(matches!(extract_auxiliary(&with_cut, &c), Err(LabError::NotCutFree)));
    }
}
