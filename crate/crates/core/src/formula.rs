//! Second-order propositional formulas, variable bookkeeping and
//! capture-avoiding substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A propositional variable, identified by its name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        Variable(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The same name with one more trailing prime.
    pub fn primed(&self) -> Variable {
        Variable::new(format!("{}'", self.0))
    }

    /// Appends primes until the name avoids `taken`.
    pub fn fresh_against(&self, taken: &BTreeSet<Variable>) -> Variable {
        let mut v = self.primed();
        while taken.contains(&v) {
            v = v.primed();
        }
        v
    }

    /// Whether the name matches the surface identifier syntax.
    pub fn is_identifier(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Variable {
    fn from(s: &str) -> Self {
        Variable::new(s)
    }
}

/// Formula AST. Negation, biconditional and truth are abbreviations
/// (`A -> bot`, `(A -> B) /\ (B -> A)`, `bot -> bot`), never constructors.
///
/// Children sit behind `Arc`, so clones are cheap and values can be shared
/// across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Variable),
    Bottom,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Exists(Variable, Arc<Formula>),
    Forall(Variable, Arc<Formula>),
    /// Application of an uninterpreted connective symbol.
    App(Arc<str>, Arc<[Formula]>),
}

impl Formula {
    pub fn var(name: impl AsRef<str>) -> Formula {
        Formula::Var(Variable::new(name))
    }

    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bottom)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn exists(v: Variable, body: Formula) -> Formula {
        Formula::Exists(v, Arc::new(body))
    }

    pub fn forall(v: Variable, body: Formula) -> Formula {
        Formula::Forall(v, Arc::new(body))
    }

    pub fn app(name: impl AsRef<str>, args: Vec<Formula>) -> Formula {
        Formula::App(Arc::from(name.as_ref()), Arc::from(args))
    }

    /// Conjunction of a list; the empty conjunction is `top`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; the empty disjunction is `bot`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Bottom,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Implies(a, b) if **a == Formula::Bottom && **b == Formula::Bottom)
    }

    /// `Some(a)` when the formula is `a -> bot`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bottom => Some(a),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bottom => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.size(),
            Formula::App(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
        match self {
            Formula::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::App(_, args) => {
                for a in args.iter() {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Exists(v, _) | Formula::Forall(v, _) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Every variable name mentioned anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Var(v) | Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    pub fn occurs_free(&self, v: &Variable) -> bool {
        self.free_vars().contains(v)
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Var(_) | Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.visit(f),
            Formula::App(_, args) => {
                for a in args.iter() {
                    a.visit(f);
                }
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                ok = false;
            }
        });
        ok
    }

    pub fn has_app(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::App(..)) {
                found = true;
            }
        });
        found
    }

    /// Quantifier-free and free of uninterpreted applications.
    pub fn is_propositional(&self) -> bool {
        self.is_quantifier_free() && !self.has_app()
    }

    /// Simultaneous capture-avoiding substitution of formulas for the free
    /// occurrences of the given variables.
    pub fn substitute(&self, bindings: &BTreeMap<Variable, Formula>) -> Formula {
        if bindings.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.substitute(bindings), b.substitute(bindings)),
            Formula::Or(a, b) => Formula::or(a.substitute(bindings), b.substitute(bindings)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(bindings), b.substitute(bindings))
            }
            Formula::App(name, args) => Formula::App(
                name.clone(),
                args.iter().map(|a| a.substitute(bindings)).collect(),
            ),
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let body_free = body.free_vars();
                let relevant: BTreeMap<Variable, Formula> = bindings
                    .iter()
                    .filter(|(k, _)| *k != x && body_free.contains(*k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                if relevant.is_empty() {
                    return self.clone();
                }
                let image_free: BTreeSet<Variable> =
                    relevant.values().flat_map(|f| f.free_vars()).collect();
                let (binder, new_body) = if image_free.contains(x) {
                    let mut taken = image_free;
                    taken.extend(body_free);
                    let fresh = x.fresh_against(&taken);
                    let mut renamed = relevant;
                    renamed.insert(x.clone(), Formula::Var(fresh.clone()));
                    (fresh, body.substitute(&renamed))
                } else {
                    (x.clone(), body.substitute(&relevant))
                };
                match self {
                    Formula::Exists(..) => Formula::exists(binder, new_body),
                    _ => Formula::forall(binder, new_body),
                }
            }
        }
    }

    /// Substitution of a single variable.
    pub fn subst1(&self, v: &Variable, by: &Formula) -> Formula {
        let mut m = BTreeMap::new();
        m.insert(v.clone(), by.clone());
        self.substitute(&m)
    }

    /// Renames bound variables to positional names that cannot clash with
    /// surface identifiers; two formulas are alpha-equivalent iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> Formula {
        if self.is_quantifier_free() {
            return self.clone();
        }
        self.canonical_in(&mut Vec::new())
    }

    fn canonical_in(&self, env: &mut Vec<Variable>) -> Formula {
        match self {
            Formula::Var(v) => match env.iter().rposition(|b| b == v) {
                Some(level) => Formula::var(format!("%{level}")),
                None => self.clone(),
            },
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.canonical_in(env), b.canonical_in(env)),
            Formula::Or(a, b) => Formula::or(a.canonical_in(env), b.canonical_in(env)),
            Formula::Implies(a, b) => {
                Formula::implies(a.canonical_in(env), b.canonical_in(env))
            }
            Formula::App(name, args) => Formula::App(
                name.clone(),
                args.iter().map(|a| a.canonical_in(env)).collect(),
            ),
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let level = Variable::new(format!("%{}", env.len()));
                env.push(x.clone());
                let b = body.canonical_in(env);
                env.pop();
                match self {
                    Formula::Exists(..) => Formula::exists(level, b),
                    _ => Formula::forall(level, b),
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.canonical() == other.canonical()
    }

    /// Replaces every free occurrence of `hole` by `filler`; thin wrapper
    /// used when a formula is read as a context with one hole.
    pub fn plug(&self, hole: &Variable, filler: &Formula) -> Formula {
        self.subst1(hole, filler)
    }
}

impl From<Variable> for Formula {
    fn from(v: Variable) -> Self {
        Formula::Var(v)
    }
}

/// A named uninterpreted connective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectiveSymbol {
    pub name: String,
    pub arity: usize,
}

/// A parametrised abbreviation `name(params) := body`, expanded at parse
/// time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Macro {
    pub params: Vec<Variable>,
    pub body: Formula,
}

/// Connective symbols (and abbreviations) in force for parsing and
/// checking. The empty signature is pure IPC syntax.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    connectives: BTreeMap<String, usize>,
    macros: BTreeMap<String, Macro>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{0}` is already declared")]
    Duplicate(String),
    #[error("`{0}` is not a valid identifier")]
    BadName(String),
    #[error("reserved word `{0}` cannot name a connective")]
    Reserved(String),
}

const RESERVED: &[&str] = &["bot", "top", "exists", "forall"];

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        self.check_name(name)?;
        self.connectives.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn define(&mut self, name: &str, m: Macro) -> Result<(), SignatureError> {
        self.check_name(name)?;
        self.macros.insert(name.to_string(), m);
        Ok(())
    }

    fn check_name(&self, name: &str) -> Result<(), SignatureError> {
        if !Variable::is_identifier(name) {
            return Err(SignatureError::BadName(name.to_string()));
        }
        if RESERVED.contains(&name) {
            return Err(SignatureError::Reserved(name.to_string()));
        }
        if self.connectives.contains_key(name) || self.macros.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.connectives.get(name).copied()
    }

    pub fn macro_def(&self, name: &str) -> Option<&Macro> {
        self.macros.get(name)
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.connectives.contains_key(name) || self.macros.contains_key(name)
    }

    pub fn connectives(&self) -> impl Iterator<Item = ConnectiveSymbol> + '_ {
        self.connectives.iter().map(|(n, a)| ConnectiveSymbol {
            name: n.clone(),
            arity: *a,
        })
    }

    /// Union of two signatures; entries of `self` win on conflict.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut out = other.clone();
        out.connectives
            .extend(self.connectives.iter().map(|(k, v)| (k.clone(), *v)));
        out.macros
            .extend(self.macros.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn includes(&self, other: &Signature) -> bool {
        other
            .connectives
            .iter()
            .all(|(k, a)| self.connectives.get(k) == Some(a))
    }
}

/// Convenience map builder for substitutions.
pub fn bindings<I, K>(pairs: I) -> BTreeMap<Variable, Formula>
where
    I: IntoIterator<Item = (K, Formula)>,
    K: Into<Variable>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn identity_substitution() {
        let out = v("X").substitute(&bindings([("X", Formula::top())]));
        assert_eq!(out, Formula::top());
    }

    #[test]
    fn capture_avoidance_renames_binder() {
        let f = Formula::exists("X".into(), Formula::and(v("X"), v("Y")));
        let out = f.substitute(&bindings([("Y", v("X"))]));
        let expected = Formula::exists("X'".into(), Formula::and(v("X'"), v("X")));
        assert_eq!(out, expected);
        assert_eq!(out.free_vars(), BTreeSet::from([Variable::new("X")]));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let f = Formula::forall("X".into(), v("X"));
        assert_eq!(f.substitute(&bindings([("X", Formula::Bottom)])), f);
    }

    #[test]
    fn regular_connective_expansion() {
        // exists Y. (~Y -> X1) /\ (~~Y -> X2) at (A, B /\ C)
        let body = Formula::and(
            Formula::implies(Formula::not(v("Y")), v("X1")),
            Formula::implies(Formula::not(Formula::not(v("Y"))), v("X2")),
        );
        let c = Formula::exists("Y".into(), body);
        let out = c.substitute(&bindings([
            ("X1", v("A")),
            ("X2", Formula::and(v("B"), v("C"))),
        ]));
        let expected = Formula::exists(
            "Y".into(),
            Formula::and(
                Formula::implies(Formula::not(v("Y")), v("A")),
                Formula::implies(Formula::not(Formula::not(v("Y"))), Formula::and(v("B"), v("C"))),
            ),
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn alpha_equivalence() {
        let a = Formula::exists("X".into(), Formula::and(v("X"), v("Z")));
        let b = Formula::exists("W".into(), Formula::and(v("W"), v("Z")));
        let c = Formula::exists("W".into(), Formula::and(v("W"), v("X")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn signature_rejects_duplicates() {
        let mut s = Signature::new();
        s.declare("t", 2).unwrap();
        assert!(matches!(s.declare("t", 1), Err(SignatureError::Duplicate(_))));
        assert!(matches!(s.declare("bot", 1), Err(SignatureError::Reserved(_))));
    }
}
