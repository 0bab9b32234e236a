use proptest::prelude::*;

use pittslab::ipc::{classical_tautology, find_countermodel, Prover, Witness};
use pittslab::kernel::fit;
use pittslab::lab::{rn_classify, LabError};
use pittslab::pitts::{pita_forall, pite_exists};
use pittslab::simplify::simplify;
use pittslab::{check_tree, derive_extensionality, parse_formula, Formula, ProofTree, SchemaTheory, Sequent, Signature, Variable};

fn formula(atoms: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(atoms).prop_map(Formula::var),
        1 => Just(Formula::Bottom),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn pq() -> impl Strategy<Value = Formula> {
    formula(&["P", "Q"], 4)
}

fn pqy() -> impl Strategy<Value = Formula> {
    formula(&["P", "Q", "Y"], 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(f in formula(&["P", "Q", "R"], 5)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn verdicts_agree_with_models(f in pq(), g in pq()) {
        let s = Sequent::new(vec![f.clone()], g.clone());
        let v = Prover::new().prove_bounded(&s, 6).unwrap();
        match v.witness {
            Witness::Proof(t) => {
                prop_assert!(check_tree(&t, &SchemaTheory::empty()).is_ok());
                prop_assert!(t.conclusion.same_as(&s));
                prop_assert!(find_countermodel(&s, 4).unwrap().is_none());
                prop_assert!(classical_tautology(&Formula::implies(f, g)).unwrap());
            }
            Witness::Countermodel { model, world } => prop_assert!(model.refutes_at(&s, world)),
            Witness::Unknown { .. } => prop_assert!(false, "no countermodel for {}", s),
        }
    }

    #[test]
    fn weakening_is_admissible(f in pq(), g in pq(), extra in pq()) {
        let p = Prover::new();
        let s = Sequent::new(vec![f.clone()], g.clone());
        if let Witness::Proof(t) = p.prove_bounded(&s, 1).unwrap().witness {
            let target = vec![f, extra];
            let w = fit(t, &target).unwrap();
            prop_assert!(check_tree(&w, &SchemaTheory::empty()).is_ok());
            prop_assert!(w.conclusion.same_as(&Sequent::new(target, g)));
        }
    }

    #[test]
    fn tree_json_round_trips(f in pq(), g in pq()) {
        let s = Sequent::new(vec![f], g);
        if let Witness::Proof(t) = Prover::new().prove_bounded(&s, 1).unwrap().witness {
            let back = ProofTree::from_json(&t.to_json(), &Signature::new()).unwrap();
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn simplification_keeps_meaning(f in formula(&["P", "Q", "R"], 4)) {
        let g = simplify(&f);
        prop_assert!(g.size() <= f.size());
        prop_assert!(Prover::new().equivalent(&f, &g).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn existential_interpolant_is_strongest(phi in pqy(), psi in pq()) {
        let y = Variable::new("Y");
        let p = Prover::new();
        let e = pite_exists(&phi, &y).unwrap();
        prop_assert!(!e.occurs_free(&y));
        prop_assert!(p.entails(std::slice::from_ref(&phi), &e).unwrap());
        prop_assert_eq!(
            p.entails(std::slice::from_ref(&e), &psi).unwrap(),
            p.entails(std::slice::from_ref(&phi), &psi).unwrap()
        );
    }

    #[test]
    fn universal_interpolant_is_weakest(phi in pqy(), psi in pq()) {
        let y = Variable::new("Y");
        let p = Prover::new();
        let a = pita_forall(&phi, &y).unwrap();
        prop_assert!(!a.occurs_free(&y));
        prop_assert!(p.entails(std::slice::from_ref(&a), &phi).unwrap());
        prop_assert_eq!(
            p.entails(std::slice::from_ref(&psi), &a).unwrap(),
            p.entails(std::slice::from_ref(&psi), &phi).unwrap()
        );
    }

    #[test]
    fn interpolants_respect_equivalence(phi in pqy()) {
        // phi /\ phi is equivalent to phi, so the interpolants must be too
        let y = Variable::new("Y");
        let p = Prover::new();
        let doubled = Formula::and(phi.clone(), phi.clone());
        prop_assert!(p.equivalent(&pite_exists(&phi, &y).unwrap(), &pite_exists(&doubled, &y).unwrap()).unwrap());
        prop_assert!(p.equivalent(&pita_forall(&phi, &y).unwrap(), &pita_forall(&doubled, &y).unwrap()).unwrap());
    }

    #[test]
    fn extensionality_trees_check(ctx in formula(&["P", "H"], 4), a in pq(), b in pq()) {
        let t = derive_extensionality(&ctx, &Variable::new("H"), &a, &b).unwrap();
        prop_assert!(check_tree(&t, &SchemaTheory::empty()).is_ok());
    }

    #[test]
    fn lattice_classes_are_a_congruence(f in formula(&["X"], 4)) {
        let p = Prover::new();
        match rn_classify(&f, 12) {
            Ok(c) => {
                prop_assert!(p.equivalent(&f, &c.representative).unwrap());
                let g = Formula::and(f.clone(), Formula::implies(Formula::Bottom, f.clone()));
                prop_assert_eq!(rn_classify(&g, 12).unwrap().level, c.level);
            }
            Err(e) => prop_assert_eq!(e, LabError::LevelExceeded(12)),
        }
    }
}
