//! The free Heyting algebra on one generator, enumerated level by level.
//!
//! With `g1 = X`, `g2 = ~X`, `g(2n+1) = g(2n-1) \/ g(2n)` and
//! `g(2n+2) = g(2n+1) -> g(2n-1)`, every one-variable formula is
//! equivalent to `bot`, `top` or exactly one `g(k)`.

use std::fmt;

use serde::Serialize;

use crate::formula::{Formula, Variable};
use crate::ipc::Prover;

use super::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RnLevel {
    Bottom,
    Level(usize),
    Top,
}

impl fmt::Display for RnLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RnLevel::Bottom => f.write_str("bot"),
            RnLevel::Level(k) => write!(f, "g{k}"),
            RnLevel::Top => f.write_str("top"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnClass {
    pub level: RnLevel,
    pub representative: Formula,
}

/// `g1 .. g(levels)` over `x`.
pub fn rn_elements(x: &Variable, levels: usize) -> Vec<Formula> {
    let mut g: Vec<Formula> = Vec::with_capacity(levels + 1);
    g.push(Formula::Bottom); // index 0 unused as a level, keeps indices aligned
    for k in 1..=levels {
        let next = match k {
            1 => Formula::Var(x.clone()),
            2 => Formula::not(Formula::Var(x.clone())),
            k if k % 2 == 1 => Formula::or(g[k - 2].clone(), g[k - 1].clone()),
            k => Formula::implies(g[k - 1].clone(), g[k - 3].clone()),
        };
        g.push(next);
    }
    g.remove(0);
    g
}

/// The single atom of `f`, or `X` when it has none.
fn generator(f: &Formula) -> Result<Variable, LabError> {
    if !f.is_propositional() {
        return Err(LabError::InvalidBody(f.to_string()));
    }
    let vars = f.free_vars();
    match vars.len() {
        0 => Ok(Variable::new("X")),
        1 => Ok(vars.into_iter().next().expect("one variable")),
        _ => Err(LabError::NotOneVariable(f.to_string())),
    }
}

/// Locates `f` in the lattice, trying `bot`, `top` and `g1 .. g(max_level)`.
pub fn rn_classify(f: &Formula, max_level: usize) -> Result<RnClass, LabError> {
    rn_classify_with(&Prover::new(), f, max_level)
}

pub fn rn_classify_with(prover: &Prover, f: &Formula, max_level: usize) -> Result<RnClass, LabError> {
    let x = generator(f)?;
    if prover.equivalent(f, &Formula::Bottom)? {
        return Ok(RnClass { level: RnLevel::Bottom, representative: Formula::Bottom });
    }
    if prover.equivalent(f, &Formula::top())? {
        return Ok(RnClass { level: RnLevel::Top, representative: Formula::top() });
    }
    for (i, g) in rn_elements(&x, max_level).into_iter().enumerate() {
        if prover.equivalent(f, &g)? {
            return Ok(RnClass { level: RnLevel::Level(i + 1), representative: g });
        }
    }
    Err(LabError::LevelExceeded(max_level))
}

/// Four consequences expected of a one-variable `psi(Y)` lying above
/// `~Y \/ ~~Y`.
#[derive(Clone, Debug, Serialize)]
pub struct LowerFacts {
    pub psi: String,
    pub class: String,
    pub claims: Vec<LowerClaim>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerClaim {
    pub name: &'static str,
    pub sequent: String,
    pub holds: bool,
}

impl LowerFacts {
    pub fn all_hold(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }
}

/// Checks `~y \/ ~~y |- psi` and then the four claims
/// `|- ~~psi`, `y |- psi`, `|- psi[psi/y]` and `psi -> y |- y`.
pub fn check_rieger_lower_facts(psi: &Formula, y: &Variable, max_level: usize) -> Result<LowerFacts, LabError> {
    let prover = Prover::new();
    let yy = Formula::Var(y.clone());
    let wlem = Formula::or(Formula::not(yy.clone()), Formula::not(Formula::not(yy.clone())));
    if !psi.free_vars().iter().all(|v| v == y) {
        return Err(LabError::NotOneVariable(psi.to_string()));
    }
    if !prover.entails(std::slice::from_ref(&wlem), psi)? {
        return Err(LabError::HypothesisFails(format!("{wlem} does not entail {psi}")));
    }
    let claims_raw = [
        ("rl1", vec![], Formula::not(Formula::not(psi.clone()))),
        ("rl2", vec![yy.clone()], psi.clone()),
        ("rl3", vec![], psi.subst1(y, psi)),
        ("rl4", vec![Formula::implies(psi.clone(), yy.clone())], yy.clone()),
    ];
    let mut claims = Vec::new();
    for (name, hyps, concl) in claims_raw {
        let holds = prover.entails(&hyps, &concl)?;
        let sequent = crate::sequent::Sequent::new(hyps, concl).to_string();
        claims.push(LowerClaim { name, sequent, holds });
    }
    let class = match rn_classify_with(&prover, psi, max_level) {
        Ok(c) => c.level.to_string(),
        Err(LabError::LevelExceeded(_)) => "unclassified".to_string(),
        Err(e) => return Err(e),
    };
    Ok(LowerFacts { psi: psi.to_string(), class, claims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn first_levels_are_pairwise_inequivalent() {
        let p = Prover::new();
        let g = rn_elements(&Variable::new("X"), 10);
        for i in 0..g.len() {
            for j in 0..i {
                assert!(!p.equivalent(&g[i], &g[j]).unwrap(), "g{} ~ g{}", i + 1, j + 1);
            }
            assert!(!p.equivalent(&g[i], &Formula::top()).unwrap());
        }
    }

    #[test]
    fn classifies_familiar_formulas() {
        let cases = [
            ("X", RnLevel::Level(1)),
            ("~~X", RnLevel::Level(4)),
            ("~X \\/ ~~X", RnLevel::Level(5)),
            ("~~X -> X", RnLevel::Level(6)),
            ("X -> X", RnLevel::Top),
            ("X /\\ ~X", RnLevel::Bottom),
        ];
        for (s, want) in cases {
            assert_eq!(rn_classify(&f(s), 12).unwrap().level, want, "{s}");
        }
    }

    #[test]
    fn level_bound_and_variables() {
        let g = rn_elements(&Variable::new("X"), 9).pop().unwrap();
        assert_eq!(rn_classify(&g, 8), Err(LabError::LevelExceeded(8)));
        assert!(matches!(rn_classify(&f("X /\\ Z"), 12), Err(LabError::NotOneVariable(_))));
    }

    #[test]
    fn lower_facts() {
        let r = check_rieger_lower_facts(&f("~Y \\/ ~~Y"), &Variable::new("Y"), 12).unwrap();
        assert!(r.all_hold());
        assert!(matches!(
            check_rieger_lower_facts(&f("Y"), &Variable::new("Y"), 12),
            Err(LabError::HypothesisFails(_))
        ));
    }
}
