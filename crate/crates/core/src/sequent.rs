//! Sequents: a multiset of hypotheses and a single conclusion.

use std::fmt;

use crate::formula::{Formula, Signature};
use crate::syntax::{self, ParseError};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub hyps: Vec<Formula>,
    pub concl: Formula,
}

impl Sequent {
    pub fn new(hyps: Vec<Formula>, concl: Formula) -> Self {
        Sequent { hyps, concl }
    }

    /// `|- f`
    pub fn goal(concl: Formula) -> Self {
        Sequent { hyps: Vec::new(), concl }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::parse_in(text, &Signature::default())
    }

    pub fn parse_in(text: &str, sig: &Signature) -> Result<Self, ParseError> {
        let (hyps, concl) = syntax::parse_sequent_parts(text, sig)?;
        Ok(Sequent { hyps, concl })
    }

    /// Hypotheses in canonical sorted order, for multiset comparison up to
    /// bound-variable renaming.
    pub fn canonical_hyps(&self) -> Vec<Formula> {
        canonical_multiset(&self.hyps)
    }

    /// Identity up to hypothesis order and alpha-equivalence.
    pub fn same_as(&self, other: &Sequent) -> bool {
        self.hyps.len() == other.hyps.len()
            && self.concl.alpha_eq(&other.concl)
            && self.canonical_hyps() == other.canonical_hyps()
    }

    pub fn with_hyp(&self, f: Formula) -> Sequent {
        let mut hyps = self.hyps.clone();
        hyps.push(f);
        Sequent { hyps, concl: self.concl.clone() }
    }

    pub fn is_propositional(&self) -> bool {
        self.concl.is_propositional() && self.hyps.iter().all(Formula::is_propositional)
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.concl.is_quantifier_free() && self.hyps.iter().all(Formula::is_quantifier_free)
    }

    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<crate::formula::Variable, Formula>,
    ) -> Sequent {
        Sequent {
            hyps: self.hyps.iter().map(|h| h.substitute(bindings)).collect(),
            concl: self.concl.substitute(bindings),
        }
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<crate::formula::Variable> {
        let mut out = self.concl.free_vars();
        for h in &self.hyps {
            out.extend(h.free_vars());
        }
        out
    }
}

pub fn canonical_multiset(fs: &[Formula]) -> Vec<Formula> {
    let mut v: Vec<Formula> = fs.iter().map(Formula::canonical).collect();
    v.sort();
    v
}

/// Multiset equality up to alpha-equivalence.
pub fn multiset_eq(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && canonical_multiset(a) == canonical_multiset(b)
}

/// Removes one occurrence of `f` (up to alpha-equivalence); `None` if absent.
pub fn remove_one(fs: &[Formula], f: &Formula) -> Option<Vec<Formula>> {
    let idx = fs
        .iter()
        .position(|g| g == f)
        .or_else(|| fs.iter().position(|g| g.alpha_eq(f)))?;
    let mut out = fs.to_vec();
    out.remove(idx);
    Some(out)
}

pub fn contains(fs: &[Formula], f: &Formula) -> bool {
    fs.iter().any(|g| g == f || g.alpha_eq(f))
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        if self.hyps.is_empty() {
            write!(f, "|- {}", self.concl)
        } else {
            write!(f, " |- {}", self.concl)
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_semantics() {
        let a = Sequent::parse("A, B, A |- C").unwrap();
        let b = Sequent::parse("B, A, A |- C").unwrap();
        let c = Sequent::parse("B, A |- C").unwrap();
        assert!(a.same_as(&b));
        assert!(!a.same_as(&c));
    }

    #[test]
    fn empty_right_side_is_bottom() {
        let s = Sequent::parse("~P, P |-").unwrap();
        assert_eq!(s.concl, Formula::Bottom);
        assert_eq!(s.to_string(), "~P, P |- bot");
    }
}
