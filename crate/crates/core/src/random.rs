//! Seeded random formulas for property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Variable};

pub struct FormulaGen {
    rng: ChaCha8Rng,
    atoms: Vec<Variable>,
    max_nodes: usize,
}

impl FormulaGen {
    /// Propositional formulas over `atoms` (plus `bot`) with at most
    /// `max_nodes` nodes.
    pub fn new(seed: u64, atoms: &[&str], max_nodes: usize) -> Self {
        FormulaGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            atoms: atoms.iter().map(Variable::new).collect(),
            max_nodes: max_nodes.max(1),
        }
    }

    pub fn formula(&mut self) -> Formula {
        let n = self.rng.gen_range(1..=self.max_nodes);
        self.sized(n)
    }

    /// A formula with at most `n` nodes (exactly `n` when `n` is odd).
    pub fn sized(&mut self, n: usize) -> Formula {
        if n < 3 {
            let k = self.rng.gen_range(0..self.atoms.len() + 1);
            return match self.atoms.get(k) {
                Some(v) => Formula::Var(v.clone()),
                None => Formula::Bottom,
            };
        }
        let left = self.rng.gen_range(1..n - 1);
        let right = n - 1 - left;
        let a = self.sized(left);
        let b = self.sized(right);
        match self.rng.gen_range(0..3) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::implies(a, b),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Iterator for FormulaGen {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        Some(self.formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_size_and_seed() {
        let a: Vec<Formula> = FormulaGen::new(7, &["P", "Q"], 12).take(50).collect();
        let b: Vec<Formula> = FormulaGen::new(7, &["P", "Q"], 12).take(50).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|f| f.size() <= 12));
    }
}
