//! Line-based proof scripts over a schema theory.
//!
//! ```text
//! # comment
//! connective t/2
//! define f(X) := t(X, X) \/ ~t(X, X)
//! schema def1 : ~P -> Q, ~Q -> P, ~t(P,Q) |- P
//! import theory.pls
//! 1 | ~t(P,top) |- P | cut 2 3 4
//! ```
//!
//! Every accepted line carries a kernel proof tree rebuilt from its
//! justification; the tree is run through [`check_tree`] before the line is
//! accepted, so a script is only as trusted as the kernel.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use crate::formula::{Formula, Macro, Signature, Variable};
use crate::ipc::{find_countermodel, Prover};
use crate::kernel::{check_tree, derive_extensionality, fit, CheckReport, ProofTree, SchemaTheory};
use crate::sequent::{contains, remove_one, Sequent};
use crate::syntax::{parse_context, parse_formula_in, parse_formula_prefix, HOLE};

pub const EXTENSION: &str = ".pls";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom { schema: String, bindings: BTreeMap<Variable, Formula> },
    Ipc,
    Cut(Vec<usize>),
    Rule { name: String, lines: Vec<usize>, bindings: BTreeMap<Variable, Formula> },
    Ext { context: Formula, p: Formula, p2: Formula },
    Subst { line: usize, bindings: BTreeMap<Variable, Formula> },
    /// `script` is `None` for a line of the current script.
    Ref { script: Option<String>, line: usize, bindings: BTreeMap<Variable, Formula> },
}

impl Justification {
    fn cited_here(&self) -> Vec<usize> {
        match self {
            Justification::Cut(ls) | Justification::Rule { lines: ls, .. } => ls.clone(),
            Justification::Subst { line, .. } => vec![*line],
            Justification::Ref { script: None, line, .. } => vec![*line],
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScriptLine {
    pub number: usize,
    pub sequent: Sequent,
    pub justification: Justification,
    pub text: String,
    /// 1-based line in the source file.
    pub source_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("{file}:{line}: {msg}")]
    Malformed { file: String, line: usize, msg: String },
    #[error("{file}:{line}: unknown justification `{name}`")]
    UnknownJustification { file: String, line: usize, name: String },
    #[error("{file}: line {number} failed: {reason}")]
    LineFailed { file: String, number: usize, reason: String },
    #[error("cannot read `{file}`: {msg}")]
    Io { file: String, msg: String },
    #[error("import or reference cycle through `{0}`")]
    Cycle(String),
}

impl ScriptError {
    /// 1 for a rejected line, 2 for anything malformed.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScriptError::LineFailed { .. } => 1,
            _ => 2,
        }
    }
}

/// Where script files come from.
pub trait ScriptSource {
    fn read(&self, name: &str) -> Result<String, String>;
}

/// Files under a directory.
pub struct DirSource {
    pub root: PathBuf,
}

impl DirSource {
    pub fn new(root: impl AsRef<Path>) -> Self {
        DirSource { root: root.as_ref().to_path_buf() }
    }
}

impl ScriptSource for DirSource {
    fn read(&self, name: &str) -> Result<String, String> {
        std::fs::read_to_string(self.root.join(name)).map_err(|e| e.to_string())
    }
}

/// In-memory files, keyed by relative path.
#[derive(Default, Clone)]
pub struct MemorySource {
    pub files: BTreeMap<String, String>,
}

impl MemorySource {
    pub fn new<I, K, V>(files: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        MemorySource { files: files.into_iter().map(|(k, v)| (k.into(), v.into())).collect() }
    }
}

impl ScriptSource for MemorySource {
    fn read(&self, name: &str) -> Result<String, String> {
        self.files.get(name).cloned().ok_or_else(|| "no such file".to_string())
    }
}

#[derive(Debug, Clone)]
pub struct CheckedLine {
    pub number: usize,
    pub sequent: Sequent,
    pub justification: String,
    pub tree: ProofTree,
    pub report: CheckReport,
}

/// An accepted script.
#[derive(Debug, Clone)]
pub struct ScriptReport {
    pub file: String,
    pub theory: SchemaTheory,
    pub lines: Vec<CheckedLine>,
}

impl ScriptReport {
    pub fn line(&self, number: usize) -> Option<&CheckedLine> {
        self.lines.iter().find(|l| l.number == number)
    }

    /// The sequent of the last line.
    pub fn derived(&self) -> Option<&Sequent> {
        self.lines.last().map(|l| &l.sequent)
    }
}

/// Resolves `name` relative to the directory of `from`.
fn resolve(from: &str, name: &str) -> String {
    let name = if name.ends_with(EXTENSION) { name.to_string() } else { format!("{name}{EXTENSION}") };
    match from.rfind('/') {
        Some(i) => format!("{}/{}", &from[..i], name),
        None => name,
    }
}

#[derive(Default)]
struct TheoryBuilder {
    /// Signature used for parsing (overrides applied).
    sig: Signature,
    /// Same declarations without overrides, to detect schemas about
    /// overridden symbols.
    plain: Signature,
    theory: SchemaTheory,
}

/// Checks scripts read from a [`ScriptSource`], caching accepted ones so
/// that references are checked once.
pub struct Checker<'a> {
    source: &'a dyn ScriptSource,
    prover: &'a Prover,
    overrides: BTreeMap<String, Macro>,
    cache: RefCell<BTreeMap<String, Rc<ScriptReport>>>,
    active: RefCell<Vec<String>>,
}

impl<'a> Checker<'a> {
    pub fn new(source: &'a dyn ScriptSource, prover: &'a Prover) -> Self {
        Checker {
            source,
            prover,
            overrides: BTreeMap::new(),
            cache: RefCell::new(BTreeMap::new()),
            active: RefCell::new(Vec::new()),
        }
    }

    /// Replaces every `connective` or `define` of the given names by the
    /// given definitions. Schemas that mention an overridden symbol and
    /// become application-free must then be IPC-derivable.
    pub fn with_overrides(mut self, overrides: BTreeMap<String, Macro>) -> Self {
        self.overrides = overrides;
        self
    }

    pub fn check(&self, file: &str) -> Result<Rc<ScriptReport>, ScriptError> {
        if let Some(r) = self.cache.borrow().get(file) {
            return Ok(r.clone());
        }
        let text = self
            .source
            .read(file)
            .map_err(|msg| ScriptError::Io { file: file.to_string(), msg })?;
        let report = Rc::new(self.check_text(file, &text)?);
        self.cache.borrow_mut().insert(file.to_string(), report.clone());
        Ok(report)
    }

    /// Checks `text` as if it were the file `file` (used for imports and
    /// references).
    pub fn check_text(&self, file: &str, text: &str) -> Result<ScriptReport, ScriptError> {
        if self.active.borrow().iter().any(|f| f == file) {
            return Err(ScriptError::Cycle(file.to_string()));
        }
        self.active.borrow_mut().push(file.to_string());
        let out = self.check_inner(file, text);
        self.active.borrow_mut().pop();
        out
    }

    fn check_inner(&self, file: &str, text: &str) -> Result<ScriptReport, ScriptError> {
        let mut tb = TheoryBuilder::default();
        let lines = self.parse(file, text, &mut tb, false)?;
        let theory = tb.theory;
        let mut done: Vec<CheckedLine> = Vec::new();
        for line in &lines {
            let failed = |reason: String| ScriptError::LineFailed {
                file: file.to_string(),
                number: line.number,
                reason,
            };
            let tree = self.justify(file, line, &done, &theory).map_err(failed)?;
            let report = check_tree(&tree, &theory).map_err(|e| failed(format!("kernel rejected the proof: {e}")))?;
            done.push(CheckedLine {
                number: line.number,
                sequent: line.sequent.clone(),
                justification: line.text.clone(),
                tree,
                report,
            });
        }
        Ok(ScriptReport { file: file.to_string(), theory, lines: done })
    }

    fn parse(
        &self,
        file: &str,
        text: &str,
        tb: &mut TheoryBuilder,
        directives_only: bool,
    ) -> Result<Vec<ScriptLine>, ScriptError> {
        let mut out: Vec<ScriptLine> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let src = i + 1;
            let bad = |msg: String| ScriptError::Malformed { file: file.to_string(), line: src, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with(|c: char| c.is_ascii_digit()) {
                if directives_only {
                    return Err(bad("imported files may only contain declarations".into()));
                }
                let l = parse_line(line, &tb.sig).map_err(|e| match e {
                    LineParse::Bad(m) => bad(m),
                    LineParse::Unknown(name) => ScriptError::UnknownJustification {
                        file: file.to_string(),
                        line: src,
                        name,
                    },
                })?;
                let l = ScriptLine { source_line: src, ..l };
                if let Some(prev) = out.last() {
                    if l.number <= prev.number {
                        return Err(bad(format!("line number {} does not increase", l.number)));
                    }
                }
                for c in l.justification.cited_here() {
                    if c >= l.number || !out.iter().any(|p| p.number == c) {
                        return Err(bad(format!("line {} cites {c}, which is not an earlier line", l.number)));
                    }
                }
                out.push(l);
            } else {
                self.directive(file, line, tb).map_err(bad)?;
            }
        }
        Ok(out)
    }

    fn directive(&self, file: &str, line: &str, tb: &mut TheoryBuilder) -> Result<(), String> {
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match word {
            "connective" => {
                let (name, arity) = rest
                    .split_once('/')
                    .ok_or_else(|| "expected `connective name/arity`".to_string())?;
                let name = name.trim();
                let arity: usize = arity.trim().parse().map_err(|_| format!("bad arity `{}`", arity.trim()))?;
                tb.plain.declare(name, arity).map_err(|e| e.to_string())?;
                match self.overrides.get(name) {
                    Some(m) if m.params.len() == arity => tb.sig.define(name, m.clone()),
                    Some(_) => return Err(format!("override for `{name}` has the wrong arity")),
                    None => tb.sig.declare(name, arity),
                }
                .map_err(|e| e.to_string())?;
                tb.theory.signature = tb.sig.clone();
                Ok(())
            }
            "define" => {
                let (head, body) = rest
                    .split_once(":=")
                    .ok_or_else(|| "expected `define name(X, ...) := formula`".to_string())?;
                let (name, params) = parse_head(head.trim())?;
                let plain = Macro { params: params.clone(), body: parse_formula_in(body.trim(), &tb.plain).map_err(|e| e.to_string())? };
                tb.plain.define(&name, plain).map_err(|e| e.to_string())?;
                let m = match self.overrides.get(&name) {
                    Some(m) if m.params.len() == params.len() => m.clone(),
                    Some(_) => return Err(format!("override for `{name}` has the wrong arity")),
                    None => Macro { params, body: parse_formula_in(body.trim(), &tb.sig).map_err(|e| e.to_string())? },
                };
                tb.sig.define(&name, m).map_err(|e| e.to_string())?;
                tb.theory.signature = tb.sig.clone();
                Ok(())
            }
            "schema" => {
                let (name, seq) = rest
                    .split_once(':')
                    .ok_or_else(|| "expected `schema name : sequent`".to_string())?;
                let name = name.trim();
                let template = Sequent::parse_in(seq.trim(), &tb.sig).map_err(|e| e.to_string())?;
                if !self.overrides.is_empty() {
                    let plain = Sequent::parse_in(seq.trim(), &tb.plain).map_err(|e| e.to_string())?;
                    let app_free = !template.hyps.iter().chain([&template.concl]).any(Formula::has_app);
                    if plain != template && app_free && !self.prover.derivable(&template).unwrap_or(false) {
                        return Err(format!("schema `{name}` is not IPC-derivable under the overriding definitions"));
                    }
                }
                tb.theory.add_schema(name, template).map_err(|e| e.to_string())
            }
            "import" => {
                let target = resolve(file, rest);
                if self.active.borrow().contains(&target) {
                    return Err(format!("import cycle through `{target}`"));
                }
                let text = self.source.read(&target).map_err(|e| format!("cannot read `{target}`: {e}"))?;
                self.active.borrow_mut().push(target.clone());
                let r = self.parse(&target, &text, tb, true);
                self.active.borrow_mut().pop();
                r.map(|_| ()).map_err(|e| e.to_string())
            }
            _ => Err(format!("unknown directive `{word}`")),
        }
    }

    fn justify(
        &self,
        file: &str,
        line: &ScriptLine,
        done: &[CheckedLine],
        theory: &SchemaTheory,
    ) -> Result<ProofTree, String> {
        let goal = &line.sequent;
        let cited = |n: usize| -> &ProofTree {
            &done.iter().find(|l| l.number == n).expect("citations validated while parsing").tree
        };
        let tree = match &line.justification {
            Justification::Axiom { schema, bindings } => {
                let s = theory
                    .schemas
                    .get(schema)
                    .ok_or_else(|| format!("no schema named `{schema}`"))?;
                let inst = s.template.substitute(bindings);
                ProofTree::schema(schema, bindings.clone(), inst)
            }
            Justification::Ipc => self.ipc(goal)?,
            Justification::Cut(ls) => {
                let trees: Vec<&ProofTree> = ls.iter().map(|&n| cited(n)).collect();
                cut_chain(goal, &trees).ok_or_else(|| {
                    format!("no arrangement of cuts on lines {} yields the sequent", join(ls))
                })?
            }
            Justification::Rule { name, lines, bindings } => {
                let trees: Vec<&ProofTree> = lines.iter().map(|&n| cited(n)).collect();
                apply_rule(name, goal, &trees, bindings)?
            }
            Justification::Ext { context, p, p2 } => {
                derive_extensionality(context, &Variable::new(HOLE), p, p2).map_err(|e| e.to_string())?
            }
            Justification::Subst { line: n, bindings } => cited(*n).substitute(bindings),
            Justification::Ref { script: None, line: n, bindings } => cited(*n).substitute(bindings),
            Justification::Ref { script: Some(s), line: n, bindings } => {
                let target = resolve(file, s);
                let other = self.check(&target).map_err(|e| format!("referenced script failed: {e}"))?;
                if !theory.extends(&other.theory) {
                    return Err(format!("`{target}` uses a theory this script does not include"));
                }
                let l = other.line(*n).ok_or_else(|| format!("`{target}` has no line {n}"))?;
                l.tree.substitute(bindings)
            }
        };
        finish(tree, goal)
    }

    /// Replaces maximal applications by fresh atoms, decides the result and
    /// maps the proof back.
    fn ipc(&self, goal: &Sequent) -> Result<ProofTree, String> {
        let mut table: Vec<(Formula, Variable)> = Vec::new();
        let hyps: Vec<Formula> = goal.hyps.iter().map(|h| atomize(h, &mut table)).collect();
        let concl = atomize(&goal.concl, &mut table);
        let s = Sequent::new(hyps, concl);
        if !self.prover.derivable(&s).map_err(|e| e.to_string())? {
            let hint = match find_countermodel(&s, 4) {
                Ok(Some(m)) => format!(" (countermodel: {m})"),
                _ => String::new(),
            };
            return Err(format!("not intuitionistically derivable{hint}"));
        }
        let v = self.prover.prove_bounded(&s, 1).map_err(|e| e.to_string())?;
        let tree = match v.witness {
            crate::ipc::Witness::Proof(t) => t,
            _ => return Err("prover returned no proof".into()),
        };
        let back: BTreeMap<Variable, Formula> = table.into_iter().map(|(f, v)| (v, f)).collect();
        Ok(tree.substitute(&back))
    }
}

fn join(ls: &[usize]) -> String {
    ls.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
}

fn atomize(f: &Formula, table: &mut Vec<(Formula, Variable)>) -> Formula {
    match f {
        Formula::App(..) => {
            if let Some((_, v)) = table.iter().find(|(g, _)| g == f) {
                return Formula::Var(v.clone());
            }
            // `_n` is not a surface identifier, so it cannot clash.
            let v = Variable::new(format!("_{}", table.len()));
            table.push((f.clone(), v.clone()));
            Formula::Var(v)
        }
        Formula::And(a, b) => Formula::and(atomize(a, table), atomize(b, table)),
        Formula::Or(a, b) => Formula::or(atomize(a, table), atomize(b, table)),
        Formula::Implies(a, b) => Formula::implies(atomize(a, table), atomize(b, table)),
        _ => f.clone(),
    }
}

/// Matches the conclusion and fits the hypotheses of `tree` to `goal`.
fn finish(tree: ProofTree, goal: &Sequent) -> Result<ProofTree, String> {
    if !tree.concl().alpha_eq(&goal.concl) {
        return Err(format!("justification proves `{}`, not `{}`", tree.conclusion, goal));
    }
    let have = tree.conclusion.clone();
    fit(tree, &goal.hyps).ok_or_else(|| {
        format!("justification proves `{have}`, whose hypotheses are not among those of `{goal}`")
    })
}

/// Finds a main premise concluding the goal and cuts the others into it in
/// some order.
fn cut_chain(goal: &Sequent, trees: &[&ProofTree]) -> Option<ProofTree> {
    fn go(t: ProofTree, rest: &mut Vec<&ProofTree>, goal: &Sequent) -> Option<ProofTree> {
        if rest.is_empty() {
            return fit(t, &goal.hyps);
        }
        for i in 0..rest.len() {
            if contains(t.hyps(), rest[i].concl()) {
                let side = rest.remove(i);
                let r = go(ProofTree::cut(side.clone(), t.clone()), rest, goal);
                rest.insert(i, side);
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }
    if trees.len() < 2 {
        return None;
    }
    for (i, main) in trees.iter().enumerate() {
        if main.concl() != &goal.concl {
            continue;
        }
        let mut rest: Vec<&ProofTree> = trees.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| *t).collect();
        if let Some(t) = go((*main).clone(), &mut rest, goal) {
            return Some(t);
        }
    }
    None
}

fn with_extra(hyps: &[Formula], extra: &Formula) -> Vec<Formula> {
    let mut v = hyps.to_vec();
    v.push(extra.clone());
    v
}

fn need(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn fit_or(tree: ProofTree, target: &[Formula]) -> Result<ProofTree, String> {
    let have = tree.conclusion.clone();
    fit(tree, target).ok_or_else(|| format!("premise `{have}` has hypotheses outside the context"))
}

fn single_binding(bindings: &BTreeMap<Variable, Formula>, x: &Variable) -> Result<Formula, String> {
    match bindings.get(x) {
        Some(w) if bindings.len() == 1 => Ok(w.clone()),
        _ => Err(format!("expected exactly the witness binding {{{x}:=...}}")),
    }
}

/// Builds the tree for `rule <name> <lines>`.
fn apply_rule(
    name: &str,
    goal: &Sequent,
    premises: &[&ProofTree],
    bindings: &BTreeMap<Variable, Formula>,
) -> Result<ProofTree, String> {
    let arity = match name {
        "andR" | "orL" => Some(2),
        "mp" => None,
        "wL" | "cL" | "wR" | "andL" | "orR1" | "orR2" | "impR" | "negR" | "contrapos" | "mono" | "existsR"
        | "existsL" | "forallR" | "forallL" => Some(1),
        _ => return Err(format!("unknown rule `{name}`")),
    };
    match arity {
        Some(n) if premises.len() != n => return Err(format!("rule {name} takes {n} line(s)")),
        None if premises.is_empty() => return Err(format!("rule {name} needs at least one line")),
        _ => {}
    }
    if !bindings.is_empty() && !matches!(name, "existsR" | "forallL") {
        return Err(format!("rule {name} takes no bindings"));
    }
    let p0 = premises[0].clone();
    let concl = &goal.concl;
    match name {
        "wL" | "cL" => Ok(p0),
        "wR" => {
            need(p0.concl() == &Formula::Bottom, "wR needs a premise concluding bot")?;
            Ok(p0.weaken_r(concl.clone()))
        }
        "andR" => {
            let Formula::And(a, b) = concl else { return Err("andR needs a conjunction on the right".into()) };
            let (l, r) = if premises[0].concl() == &**a && premises[1].concl() == &**b {
                (premises[0], premises[1])
            } else if premises[1].concl() == &**a && premises[0].concl() == &**b {
                (premises[1], premises[0])
            } else {
                return Err("premises do not conclude the two conjuncts".into());
            };
            Ok(ProofTree::and_r(fit_or(l.clone(), &goal.hyps)?, fit_or(r.clone(), &goal.hyps)?))
        }
        "andL" => {
            let mut t = p0;
            let mut changed = false;
            for h in &goal.hyps {
                let Formula::And(a, b) = h else { continue };
                if contains(t.hyps(), h) {
                    continue;
                }
                if contains(t.hyps(), a) {
                    t = t.and_l1(a, (**b).clone());
                    changed = true;
                }
                if contains(t.hyps(), b) {
                    t = t.and_l2((**a).clone(), b);
                    changed = true;
                }
            }
            need(changed, "no conjunctive hypothesis to introduce")?;
            Ok(t)
        }
        "orL" => {
            for h in &goal.hyps {
                let Formula::Or(a, b) = h else { continue };
                let gamma = remove_one(&goal.hyps, h).expect("hypothesis present");
                for (l, r) in [(premises[0], premises[1]), (premises[1], premises[0])] {
                    if contains(l.hyps(), a) && contains(r.hyps(), b) && l.concl() == concl && r.concl() == concl {
                        let l = fit_or(l.clone(), &with_extra(&gamma, a))?;
                        let r = fit_or(r.clone(), &with_extra(&gamma, b))?;
                        return Ok(ProofTree::or_l(l, r, a, b));
                    }
                }
            }
            Err("no disjunctive hypothesis matches the premises".into())
        }
        "orR1" | "orR2" => {
            let Formula::Or(a, b) = concl else { return Err(format!("{name} needs a disjunction on the right")) };
            if name == "orR1" {
                need(p0.concl() == &**a, "premise does not conclude the left disjunct")?;
                Ok(p0.or_r1((**b).clone()))
            } else {
                need(p0.concl() == &**b, "premise does not conclude the right disjunct")?;
                Ok(p0.or_r2((**a).clone()))
            }
        }
        "impR" | "negR" => {
            let Formula::Implies(a, b) = concl else { return Err(format!("{name} needs an implication on the right")) };
            if name == "negR" {
                need(**b == Formula::Bottom, "negR needs a negation on the right")?;
            }
            need(p0.concl() == &**b, "premise does not conclude the consequent")?;
            Ok(fit_or(p0, &with_extra(&goal.hyps, a))?.imp_r(a))
        }
        "mp" => {
            // major premise concludes A1 -> ... -> Ak -> goal; each Ai comes
            // from a minor premise or from the goal's hypotheses
            let mut t = p0;
            let mut minors: Vec<&ProofTree> = premises[1..].to_vec();
            while t.concl() != concl {
                let Formula::Implies(a, b) = t.concl().clone() else {
                    return Err("major premise is not an implication ending in the goal".into());
                };
                let arg = match minors.iter().position(|m| m.concl() == &*a) {
                    Some(i) => minors.remove(i).clone(),
                    None if contains(&goal.hyps, &a) => ProofTree::ax((*a).clone()),
                    None => return Err(format!("nothing proves the antecedent `{a}`")),
                };
                let step = ProofTree::imp_l(arg, ProofTree::ax((*b).clone()), &b);
                t = ProofTree::cut(t, step);
            }
            need(minors.is_empty(), "unused minor premise")?;
            Ok(t)
        }
        "contrapos" => {
            // Gamma, A |- B  gives  Gamma, B -> X |- A -> X
            let Formula::Implies(a, x) = concl else { return Err("contrapos needs an implication on the right".into()) };
            let bx = Formula::implies(p0.concl().clone(), (**x).clone());
            need(contains(&goal.hyps, &bx), &format!("hypothesis `{bx}` missing"))?;
            let t = ProofTree::imp_l(p0, ProofTree::ax((**x).clone()), x);
            Ok(fit_or(t, &with_extra(&goal.hyps, a))?.imp_r(a))
        }
        "mono" => {
            // Gamma, A |- B  gives  Gamma, C -> A |- C -> B
            let Formula::Implies(c, b) = concl else { return Err("mono needs an implication on the right".into()) };
            need(p0.concl() == &**b, "premise does not conclude the consequent")?;
            let ca = goal
                .hyps
                .iter()
                .find_map(|h| match h {
                    Formula::Implies(c2, a) if c2 == c && contains(p0.hyps(), a) => Some((**a).clone()),
                    _ => None,
                })
                .ok_or_else(|| "no hypothesis C -> A with A among the premise's hypotheses".to_string())?;
            let t = ProofTree::imp_l(ProofTree::ax((**c).clone()), p0, &ca);
            Ok(fit_or(t, &with_extra(&goal.hyps, c))?.imp_r(c))
        }
        "existsR" => {
            let Formula::Exists(x, body) = concl else { return Err("existsR needs an existential on the right".into()) };
            let w = single_binding(bindings, x)?;
            need(p0.concl().alpha_eq(&body.subst1(x, &w)), "premise does not conclude the witnessed instance")?;
            Ok(p0.exists_r(x.clone(), (**body).clone(), w))
        }
        "forallR" => {
            let Formula::Forall(x, body) = concl else { return Err("forallR needs a universal on the right".into()) };
            need(p0.concl() == &**body, "premise does not conclude the body")?;
            Ok(p0.forall_r(x.clone()))
        }
        "existsL" => {
            for h in &goal.hyps {
                let Formula::Exists(x, body) = h else { continue };
                if contains(p0.hyps(), body) {
                    let gamma = remove_one(&goal.hyps, h).expect("hypothesis present");
                    let t = fit_or(p0, &with_extra(&gamma, body))?;
                    return Ok(t.exists_l(x.clone(), (**body).clone()));
                }
            }
            Err("no existential hypothesis whose body the premise uses".into())
        }
        "forallL" => {
            for h in &goal.hyps {
                let Formula::Forall(x, body) = h else { continue };
                let Ok(w) = single_binding(bindings, x) else { continue };
                let inst = body.subst1(x, &w);
                if contains(p0.hyps(), &inst) {
                    let gamma = remove_one(&goal.hyps, h).expect("hypothesis present");
                    let t = fit_or(p0, &with_extra(&gamma, &inst))?;
                    return Ok(t.forall_l(x.clone(), (**body).clone(), w));
                }
            }
            Err("no universal hypothesis whose instance the premise uses".into())
        }
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Parsing of numbered lines.

enum LineParse {
    Bad(String),
    Unknown(String),
}

fn parse_head(head: &str) -> Result<(String, Vec<Variable>), String> {
    let (name, params) = match head.split_once('(') {
        Some((n, p)) => {
            let p = p.strip_suffix(')').ok_or_else(|| "missing `)`".to_string())?;
            let ps: Vec<Variable> = p
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    if Variable::is_identifier(s) {
                        Ok(Variable::new(s))
                    } else {
                        Err(format!("bad parameter `{s}`"))
                    }
                })
                .collect::<Result<_, _>>()?;
            (n.trim().to_string(), ps)
        }
        None => (head.to_string(), vec![]),
    };
    let distinct: BTreeSet<&Variable> = params.iter().collect();
    if distinct.len() != params.len() {
        return Err("repeated parameter".into());
    }
    Ok((name, params))
}

fn parse_line(line: &str, sig: &Signature) -> Result<ScriptLine, LineParse> {
    let bad = |m: &str| LineParse::Bad(m.to_string());
    let (num, rest) = line.split_once('|').ok_or_else(|| bad("expected `<n> | <sequent> | <justification>`"))?;
    let (seq, just) = rest.rsplit_once('|').ok_or_else(|| bad("expected `<n> | <sequent> | <justification>`"))?;
    if just.trim_start().starts_with('-') {
        return Err(bad("missing justification"));
    }
    let number: usize = num.trim().parse().map_err(|_| bad("bad line number"))?;
    let sequent = Sequent::parse_in(seq.trim(), sig).map_err(|e| LineParse::Bad(e.to_string()))?;
    let justification = parse_justification(just.trim(), sig)?;
    Ok(ScriptLine { number, sequent, justification, text: just.trim().to_string(), source_line: 0 })
}

fn split_bindings(text: &str) -> (&str, Option<&str>) {
    match text.find('{') {
        Some(i) => (text[..i].trim(), Some(&text[i..])),
        None => (text.trim(), None),
    }
}

fn parse_bindings(text: Option<&str>, sig: &Signature) -> Result<BTreeMap<Variable, Formula>, LineParse> {
    let bad = |m: String| LineParse::Bad(m);
    let mut out = BTreeMap::new();
    let Some(text) = text else { return Ok(out) };
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| bad("bindings must look like {X:=formula, ...}".into()))?;
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    for part in parts.into_iter().filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once(":=").ok_or_else(|| bad(format!("binding `{}` lacks `:=`", part.trim())))?;
        let k = k.trim();
        if !Variable::is_identifier(k) {
            return Err(bad(format!("bad variable `{k}` in bindings")));
        }
        let f = parse_formula_in(v.trim(), sig).map_err(|e| bad(e.to_string()))?;
        if out.insert(Variable::new(k), f).is_some() {
            return Err(bad(format!("variable `{k}` bound twice")));
        }
    }
    Ok(out)
}

fn parse_numbers(text: &str) -> Result<Vec<usize>, LineParse> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| LineParse::Bad(format!("expected a line number, found `{s}`"))))
        .collect()
}

fn parse_justification(text: &str, sig: &Signature) -> Result<Justification, LineParse> {
    let (word, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let bad = |m: String| LineParse::Bad(m);
    match word {
        "ipc" => {
            if !rest.is_empty() {
                return Err(bad("`ipc` takes no arguments".into()));
            }
            Ok(Justification::Ipc)
        }
        "ax-schema" => {
            let (name, b) = split_bindings(rest);
            if name.is_empty() {
                return Err(bad("missing schema name".into()));
            }
            Ok(Justification::Axiom { schema: name.to_string(), bindings: parse_bindings(b, sig)? })
        }
        "cut" => {
            let ls = parse_numbers(rest)?;
            if ls.len() < 2 {
                return Err(bad("`cut` cites at least two lines".into()));
            }
            Ok(Justification::Cut(ls))
        }
        "rule" => {
            let (head, b) = split_bindings(rest);
            let (name, nums) = head.split_once(char::is_whitespace).unwrap_or((head, ""));
            Ok(Justification::Rule {
                name: name.to_string(),
                lines: parse_numbers(nums)?,
                bindings: parse_bindings(b, sig)?,
            })
        }
        "subst" => {
            let (head, b) = split_bindings(rest);
            let ls = parse_numbers(head)?;
            if ls.len() != 1 {
                return Err(bad("`subst` cites one line".into()));
            }
            Ok(Justification::Subst { line: ls[0], bindings: parse_bindings(b, sig)? })
        }
        "ref" => {
            let (head, b) = split_bindings(rest);
            let (script, n) = match head.rsplit_once(':') {
                Some((s, n)) => (Some(s.trim().to_string()), n),
                None => (None, head),
            };
            let line = n.trim().parse().map_err(|_| bad(format!("bad line number `{}`", n.trim())))?;
            Ok(Justification::Ref { script, line, bindings: parse_bindings(b, sig)? })
        }
        "ext" => {
            let (context, used) = parse_formula_prefix(rest, sig, true).map_err(|e| bad(e.to_string()))?;
            // re-parse to reject trailing junk inside the context
            let context_text = &rest[..used];
            let context = parse_context(context_text.trim(), sig).unwrap_or(context);
            let rest2 = &rest[used..];
            let (p, used2) = parse_formula_prefix(rest2, sig, false).map_err(|e| bad(e.to_string()))?;
            let p2 = parse_formula_in(rest2[used2..].trim(), sig).map_err(|e| bad(e.to_string()))?;
            if !context.occurs_free(&Variable::new(HOLE)) {
                return Err(bad("extensionality context has no hole `_`".into()));
            }
            Ok(Justification::Ext { context, p, p2 })
        }
        other => Err(LineParse::Unknown(other.to_string())),
    }
}

impl fmt::Display for ScriptReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{:>3} | {} | {}", l.number, l.sequent, l.justification)?;
        }
        Ok(())
    }
}
