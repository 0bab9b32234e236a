//! Size-reducing simplification of propositional formulas up to
//! intuitionistic equivalence.

use std::collections::BTreeSet;

use crate::formula::{Formula, Variable};
use crate::ipc::Prover;

fn rewrite(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bottom => f.clone(),
        Formula::And(a, b) => {
            let (a, b) = (rewrite(a), rewrite(b));
            if a.is_top() {
                b
            } else if b.is_top() || a == b {
                a
            } else if a == Formula::Bottom || b == Formula::Bottom {
                Formula::Bottom
            } else if matches!(&b, Formula::Or(x, y) if **x == a || **y == a) {
                a
            } else if matches!(&a, Formula::Or(x, y) if **x == b || **y == b) {
                b
            } else {
                Formula::and(a, b)
            }
        }
        Formula::Or(a, b) => {
            let (a, b) = (rewrite(a), rewrite(b));
            if a == Formula::Bottom {
                b
            } else if b == Formula::Bottom || a == b {
                a
            } else if a.is_top() || b.is_top() {
                Formula::top()
            } else if matches!(&b, Formula::And(x, y) if **x == a || **y == a) {
                a
            } else if matches!(&a, Formula::And(x, y) if **x == b || **y == b) {
                b
            } else {
                Formula::or(a, b)
            }
        }
        Formula::Implies(a, b) => {
            let (a, b) = (rewrite(a), rewrite(b));
            if a.is_top() {
                b
            } else if a == Formula::Bottom || b.is_top() || a == b {
                Formula::top()
            } else if let (Some(x), Formula::Bottom) =
                (a.as_negation().and_then(Formula::as_negation), &b)
            {
                // ~~~x -> ~x
                Formula::not(x.clone())
            } else {
                Formula::implies(a, b)
            }
        }
        _ => f.clone(),
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

fn disjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(a, b) => {
            disjuncts(a, out);
            disjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

struct Simplifier<'a> {
    prover: &'a Prover,
    pool: Vec<Formula>,
}

impl Simplifier<'_> {
    fn equiv(&self, a: &Formula, b: &Formula) -> bool {
        self.prover.equivalent(a, b).unwrap_or(false)
    }

    fn entails(&self, hyps: &[Formula], c: &Formula) -> bool {
        self.prover.entails(hyps, c).unwrap_or(false)
    }

    /// Bottom-up: simplify children, drop redundant conjuncts/disjuncts,
    /// then replace by a strictly smaller equivalent pool formula.
    fn go(&self, f: &Formula) -> Formula {
        let g = match f {
            Formula::And(a, b) => {
                let mut parts = Vec::new();
                conjuncts(&Formula::and(self.go(a), self.go(b)), &mut parts);
                let mut i = 0;
                while i < parts.len() && parts.len() > 1 {
                    let others: Vec<Formula> = parts
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, p)| p.clone())
                        .collect();
                    if self.entails(&others, &parts[i]) {
                        parts.remove(i);
                    } else {
                        i += 1;
                    }
                }
                rewrite(&Formula::conj(parts))
            }
            Formula::Or(a, b) => {
                let mut parts = Vec::new();
                disjuncts(&Formula::or(self.go(a), self.go(b)), &mut parts);
                let mut i = 0;
                while i < parts.len() && parts.len() > 1 {
                    let absorbed = parts
                        .iter()
                        .enumerate()
                        .any(|(j, p)| j != i && self.entails(std::slice::from_ref(&parts[i]), p));
                    if absorbed {
                        parts.remove(i);
                    } else {
                        i += 1;
                    }
                }
                rewrite(&Formula::disj(parts))
            }
            Formula::Implies(a, b) => rewrite(&Formula::implies(self.go(a), self.go(b))),
            _ => f.clone(),
        };
        let g = if g.size() <= f.size() { g } else { rewrite(f) };
        self.smaller_from_pool(g)
    }

    fn smaller_from_pool(&self, g: Formula) -> Formula {
        for c in &self.pool {
            if c.size() > g.size() {
                break;
            }
            if self.equiv(c, &g) {
                return c.clone();
            }
        }
        g
    }
}

fn literal_pool(atoms: &BTreeSet<Variable>) -> Vec<Formula> {
    let mut pool = vec![Formula::Bottom];
    let lits: Vec<Formula> = atoms.iter().cloned().map(Formula::Var).collect();
    pool.extend(lits.iter().cloned());
    pool.push(Formula::top());
    for a in &lits {
        pool.push(Formula::not(a.clone()));
    }
    for a in &lits {
        pool.push(Formula::not(Formula::not(a.clone())));
    }
    for (i, a) in lits.iter().enumerate() {
        for b in &lits[i + 1..] {
            pool.push(Formula::and(a.clone(), b.clone()));
            pool.push(Formula::or(a.clone(), b.clone()));
            pool.push(Formula::implies(a.clone(), b.clone()));
            pool.push(Formula::implies(b.clone(), a.clone()));
        }
    }
    for (i, a) in lits.iter().enumerate() {
        for b in &lits[i + 1..] {
            pool.push(Formula::not(Formula::not(Formula::and(a.clone(), b.clone()))));
        }
    }
    pool.sort_by_key(Formula::size);
    pool
}

/// Returns an equivalent formula no larger than `f`: unit laws,
/// idempotence, absorption and triple-negation collapse are applied to a
/// fixpoint, redundant conjuncts and disjuncts are dropped, and subformulas
/// are replaced by smaller equivalent literals where possible. Formulas with
/// quantifiers or applications are returned unchanged.
pub fn simplify(f: &Formula) -> Formula {
    simplify_with(&Prover::new(), f)
}

pub fn simplify_with(prover: &Prover, f: &Formula) -> Formula {
    if !f.is_propositional() {
        return f.clone();
    }
    let s = Simplifier { prover, pool: literal_pool(&f.free_vars()) };
    let mut cur = f.clone();
    loop {
        let next = s.go(&rewrite(&cur));
        if next == cur || next.size() > cur.size() {
            return cur;
        }
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipc::equivalent;
    use crate::syntax::parse_formula;

    fn simp(s: &str) -> String {
        simplify(&parse_formula(s).unwrap()).to_string()
    }

    #[test]
    fn unit_laws_and_negations() {
        assert_eq!(simp("top /\\ X"), "X");
        assert_eq!(simp("~~~P"), "~P");
        assert_eq!(simp("X \\/ (X /\\ Y)"), "X");
        assert_eq!(simp("(bot -> A) /\\ (A \\/ bot)"), "A");
    }

    #[test]
    fn keeps_equivalence_and_size() {
        for s in ["(~A -> B) /\\ (~B -> A)", "((A -> B) -> A) -> A", "~~(A \\/ ~A) /\\ B"] {
            let f = parse_formula(s).unwrap();
            let g = simplify(&f);
            assert!(g.size() <= f.size());
            assert!(equivalent(&f, &g).unwrap());
        }
    }
}
