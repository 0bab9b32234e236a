use pittslab::ipc::Prover;
use pittslab::lab::connective::{bundled_trees, connective_from_text, exists_right_tree};
use pittslab::lab::{check_rieger_lower_facts, extract_auxiliary, is_auxiliary, replay, rn_classify, LabError, RnLevel};
use pittslab::{parse_formula, Formula, ProofTree, Variable};

#[test]
fn example_connective_has_conjunction_as_auxiliary() {
    let c = connective_from_text("(Y \\/ ~Y) -> P /\\ Q", "Y").unwrap();
    let r = is_auxiliary(&c, &parse_formula("P /\\ Q").unwrap()).unwrap();
    assert!(r.holds);
    let p = Prover::new();
    assert!(p.equivalent(&r.interpolant, &parse_formula("~~(P /\\ Q)").unwrap()).unwrap());
    assert!(p.equivalent(&r.definition, &r.interpolant).unwrap());
    assert_eq!(r.certificates.len(), 2);
}

#[test]
fn realizability_body_rejects_bottom() {
    let c = connective_from_text("(~Y -> X1) /\\ (~~Y -> X2)", "Y").unwrap();
    assert!(!is_auxiliary(&c, &Formula::Bottom).unwrap().holds);
}

#[test]
fn extracted_candidates_are_auxiliary_and_definitions_match() {
    let p = Prover::new();
    for (name, c, t) in bundled_trees() {
        let ex = extract_auxiliary(&t, &c).unwrap();
        assert!(ex.report.holds, "{name}");
        assert!(p.equivalent(&ex.report.definition, &ex.report.interpolant).unwrap(), "{name}");
    }
}

#[test]
fn extraction_rejects_other_shapes() {
    let c = connective_from_text("(Y \\/ ~Y) -> P /\\ Q", "Y").unwrap();
    // a tree for a different connective
    let other = connective_from_text("Y -> P", "Y").unwrap();
    assert!(matches!(extract_auxiliary(&exists_right_tree(), &other), Err(LabError::WrongConclusion { .. })));
    // an axiom concluding the quantified formula has no witness to read
    let ax = ProofTree::ax(c.formula());
    assert!(matches!(extract_auxiliary(&ax, &c), Err(LabError::NoEligibleRule(_))));
}

#[test]
fn lower_facts_hold_above_weak_excluded_middle() {
    let y = Variable::new("Y");
    for psi in ["~Y \\/ ~~Y", "top", "(~~Y -> Y) -> Y \\/ ~Y", "~~Y \\/ (~~Y -> Y)"] {
        let r = check_rieger_lower_facts(&parse_formula(psi).unwrap(), &y, 12).unwrap();
        assert!(r.all_hold(), "{psi}");
        assert_eq!(r.claims.len(), 4);
    }
}

#[test]
fn lattice_examples() {
    let f = |s: &str| rn_classify(&parse_formula(s).unwrap(), 12).unwrap().level;
    assert_eq!(f("X /\\ X"), f("X"));
    assert_eq!(f("~~~X"), f("~X"));
    assert_eq!(f("bot"), RnLevel::Bottom);
    assert_eq!(f("X \\/ ~X -> X \\/ ~X"), RnLevel::Top);
}

#[test]
fn replay_reports_serialize() {
    let r = replay("polacik").unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["name"], "polacik");
    assert_eq!(v["derived"][0], "|- t(P) \\/ ~t(P)");
    assert!(v["scripts"].as_array().unwrap().iter().all(|s| s["status"] == "ok"));
}
