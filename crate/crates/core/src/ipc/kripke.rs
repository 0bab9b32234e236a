//! Finite Kripke models and exhaustive countermodel search over rooted
//! posets, used as an independent refutation oracle.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::formula::{Formula, Variable};
use crate::sequent::Sequent;

use super::prover::check_supported;
use super::IpcError;

/// Largest number of worlds the search accepts.
pub const MAX_WORLDS: usize = 7;

/// Worlds are `0..n`; world 0 is the root when the model came out of
/// [`find_countermodel`]. `up[w]` is the bitmask of worlds above `w`
/// (including `w`); `val[i]` is the bitmask of worlds forcing `atoms[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    up: Vec<u64>,
    atoms: Vec<Variable>,
    val: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("order is not a partial order")]
    NotPartialOrder,
    #[error("valuation of {0} is not persistent")]
    NotPersistent(Variable),
    #[error("at most 64 worlds supported")]
    TooLarge,
}

impl KripkeModel {
    /// Builds a model from the full order relation (pairs `(v, w)` with
    /// `v <= w`; reflexivity is added) and per-world forced atoms.
    pub fn new(
        worlds: usize,
        order: &[(usize, usize)],
        forced: &[BTreeSet<Variable>],
    ) -> Result<Self, ModelError> {
        if worlds > 64 || forced.len() != worlds {
            return Err(ModelError::TooLarge);
        }
        let mut up: Vec<u64> = (0..worlds).map(|w| 1u64 << w).collect();
        for &(v, w) in order {
            if v >= worlds || w >= worlds {
                return Err(ModelError::NotPartialOrder);
            }
            up[v] |= 1 << w;
        }
        let atoms: Vec<Variable> = forced.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let val = atoms
            .iter()
            .map(|a| {
                (0..worlds)
                    .filter(|&w| forced[w].contains(a))
                    .fold(0u64, |m, w| m | 1 << w)
            })
            .collect();
        let m = KripkeModel { up, atoms, val };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.worlds();
        for v in 0..n {
            for w in 0..n {
                let vw = self.leq(v, w);
                if vw && v != w && self.leq(w, v) {
                    return Err(ModelError::NotPartialOrder);
                }
                if vw && self.up[w] & !self.up[v] != 0 {
                    return Err(ModelError::NotPartialOrder);
                }
            }
        }
        for (a, &m) in self.atoms.iter().zip(&self.val) {
            for w in 0..n {
                if m >> w & 1 == 1 && self.up[w] & !m != 0 {
                    return Err(ModelError::NotPersistent(a.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn worlds(&self) -> usize {
        self.up.len()
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.up[v] >> w & 1 == 1
    }

    /// Atoms forced at `w`.
    pub fn forced_atoms(&self, w: usize) -> BTreeSet<Variable> {
        self.atoms
            .iter()
            .zip(&self.val)
            .filter(|(_, &m)| m >> w & 1 == 1)
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Bitmask of worlds forcing `f`. Atoms outside the model are forced
    /// nowhere. Quantifiers and applications are not interpreted.
    pub fn extension(&self, f: &Formula) -> u64 {
        let all = if self.worlds() == 64 { u64::MAX } else { (1u64 << self.worlds()) - 1 };
        ext(f, &self.up, &|v| {
            self.atoms.iter().position(|a| a == v).map_or(0, |i| self.val[i])
        }, all)
    }

    pub fn forces(&self, w: usize, f: &Formula) -> bool {
        self.extension(f) >> w & 1 == 1
    }

    /// Whether world `w` forces all hypotheses of `s` but not its conclusion.
    pub fn refutes_at(&self, s: &Sequent, w: usize) -> bool {
        s.hyps.iter().all(|h| self.forces(w, h)) && !self.forces(w, &s.concl)
    }

    /// Immediate successors, for compact display.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.worlds();
        let mut out = Vec::new();
        for v in 0..n {
            for w in 0..n {
                if v != w
                    && self.leq(v, w)
                    && !(0..n).any(|u| u != v && u != w && self.leq(v, u) && self.leq(u, w))
                {
                    out.push((v, w));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct J {
            worlds: usize,
            order: Vec<(usize, usize)>,
            valuation: Vec<Vec<String>>,
        }
        let j = J {
            worlds: self.worlds(),
            order: self.covers(),
            valuation: (0..self.worlds())
                .map(|w| self.forced_atoms(w).iter().map(|a| a.to_string()).collect())
                .collect(),
        };
        serde_json::to_value(j).expect("model serializes")
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "worlds: {}", self.worlds())?;
        let covers = self.covers();
        if !covers.is_empty() {
            let s: Vec<String> = covers.iter().map(|(v, w)| format!("{v}<{w}")).collect();
            writeln!(f, "order: {}", s.join(" "))?;
        }
        for w in 0..self.worlds() {
            let atoms: Vec<String> = self.forced_atoms(w).iter().map(|a| a.to_string()).collect();
            writeln!(f, "  {w}: {{{}}}", atoms.join(", "))?;
        }
        Ok(())
    }
}

fn ext(f: &Formula, up: &[u64], atom: &dyn Fn(&Variable) -> u64, all: u64) -> u64 {
    match f {
        Formula::Var(v) => atom(v),
        Formula::Bottom => 0,
        Formula::And(a, b) => ext(a, up, atom, all) & ext(b, up, atom, all),
        Formula::Or(a, b) => ext(a, up, atom, all) | ext(b, up, atom, all),
        Formula::Implies(a, b) => {
            let bad = ext(a, up, atom, all) & !ext(b, up, atom, all);
            let mut m = 0;
            for (w, &u) in up.iter().enumerate() {
                if u & bad == 0 {
                    m |= 1 << w;
                }
            }
            m & all
        }
        Formula::Exists(..) | Formula::Forall(..) | Formula::App(..) => 0,
    }
}

/// Rooted posets on `n` worlds up to isomorphism, as up-set masks with the
/// root at 0 and every world's successors numbered above it.
pub fn rooted_posets(n: usize) -> Vec<Vec<u64>> {
    static CACHE: OnceLock<Mutex<Vec<Option<Vec<Vec<u64>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![None; MAX_WORLDS + 1]));
    if n == 0 || n > MAX_WORLDS {
        return Vec::new();
    }
    if let Some(v) = &cache.lock().unwrap()[n] {
        return v.clone();
    }
    let v = enumerate_rooted(n);
    cache.lock().unwrap()[n] = Some(v.clone());
    v
}

fn enumerate_rooted(n: usize) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations_fixing_zero(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for bits in 0u64..(1 << pairs.len()) {
        let mut up: Vec<u64> = (0..n).map(|w| 1u64 << w).collect();
        up[0] = (1 << n) - 1;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if bits >> k & 1 == 1 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|v| {
            (0..n).all(|w| up[v] >> w & 1 == 0 || up[w] & !up[v] == 0)
        });
        if !transitive {
            continue;
        }
        let canon = canonical(&up, &perms);
        if seen.insert(canon) {
            out.push(up);
        }
    }
    out
}

/// Smallest relabelled encoding over relabellings that keep the numbering
/// a linear extension of the order.
fn canonical(up: &[u64], perms: &[Vec<usize>]) -> Vec<u64> {
    let n = up.len();
    let mut best: Option<Vec<u64>> = None;
    for p in perms {
        // p[old] = new; must keep v <= w implies p[v] <= p[w]
        let ok = (0..n).all(|v| (0..n).all(|w| up[v] >> w & 1 == 0 || p[v] <= p[w]));
        if !ok {
            continue;
        }
        let mut code = vec![0u64; n];
        for v in 0..n {
            let mut m = 0u64;
            for w in 0..n {
                if up[v] >> w & 1 == 1 {
                    m |= 1 << p[w];
                }
            }
            code[p[v]] = m;
        }
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    }
    best.expect("identity is a linear extension")
}

fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..n).collect();
    permute(&mut rest, 0, &mut out);
    out.into_iter()
        .map(|r| std::iter::once(0).chain(r).collect())
        .collect()
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Odometer step, last position fastest; false after the final tuple.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < base {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn upsets(up: &[u64]) -> Vec<u64> {
    let n = up.len();
    (0u64..(1 << n))
        .filter(|&m| (0..n).all(|w| m >> w & 1 == 0 || up[w] & !m == 0))
        .collect()
}

/// Searches rooted models of increasing size, up to `max_worlds`, for one
/// whose root forces every hypothesis and not the conclusion.
pub fn find_countermodel(s: &Sequent, max_worlds: usize) -> Result<Option<KripkeModel>, IpcError> {
    check_supported(s)?;
    if max_worlds == 0 || max_worlds > MAX_WORLDS {
        return Err(IpcError::BadBound(max_worlds));
    }
    let atoms: Vec<Variable> = s.free_vars().into_iter().collect();
    for n in 1..=max_worlds {
        let all = (1u64 << n) - 1;
        for up in rooted_posets(n) {
            let ups = upsets(&up);
            let mut idx = vec![0usize; atoms.len()];
            loop {
                let val: Vec<u64> = idx.iter().map(|&i| ups[i]).collect();
                let lookup = |v: &Variable| {
                    atoms.iter().position(|a| a == v).map_or(0, |i| val[i])
                };
                let root = |f: &Formula| ext(f, &up, &lookup, all) & 1 == 1;
                if s.hyps.iter().all(root) && !root(&s.concl) {
                    return Ok(Some(KripkeModel { up: up.clone(), atoms: atoms.clone(), val }));
                }
                if !advance(&mut idx, ups.len()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_counts() {
        // rooted posets = posets on n-1 elements with a bottom added
        let counts: Vec<usize> = (1..=6).map(|n| rooted_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn excluded_middle_needs_two_worlds() {
        let s = Sequent::parse("|- P \\/ ~P").unwrap();
        let m = find_countermodel(&s, 6).unwrap().unwrap();
        assert_eq!(m.worlds(), 2);
        assert!(m.refutes_at(&s, 0));
        m.validate().unwrap();
    }

    #[test]
    fn valid_sequent_has_no_countermodel() {
        let s = Sequent::parse("|- P -> P").unwrap();
        assert!(find_countermodel(&s, 6).unwrap().is_none());
    }

    #[test]
    fn classical_counter_valuation() {
        let s = Sequent::parse("(~X1 -> X2) /\\ (~X2 -> X1) |- X1").unwrap();
        let m = find_countermodel(&s, 1).unwrap().unwrap();
        assert_eq!(m.worlds(), 1);
        assert!(!m.forces(0, &Formula::var("X1")));
        assert!(m.forces(0, &Formula::var("X2")));
    }

    #[test]
    fn rejects_non_persistent() {
        let a = Variable::new("A");
        let r = KripkeModel::new(2, &[(0, 1)], &[BTreeSet::from([a]), BTreeSet::new()]);
        assert!(matches!(r, Err(ModelError::NotPersistent(_))));
    }
}
