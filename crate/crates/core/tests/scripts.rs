use std::collections::BTreeMap;

use pittslab::ipc::Prover;
use pittslab::kernel::Rule;
use pittslab::script::{Checker, DirSource, MemorySource, ScriptError};
use pittslab::{parse_formula, parse_formula_in, Macro, Signature, Variable};

fn source() -> DirSource {
    DirSource::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scripts"))
}

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/scripts/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn tara_double_negation_elimination() {
    let src = source();
    let prover = Prover::new();
    let checker = Checker::new(&src, &prover);
    let r = checker.check("tara/dnegelim.pls").unwrap_or_else(|e| panic!("{e}"));
    assert_eq!(r.derived().unwrap().to_string(), "~~P |- P");
    // every line carries a checked tree, and the cited table is reused
    assert!(r.lines.iter().all(|l| l.report.nodes == l.tree.size()));
    assert!(r.lines.last().unwrap().tree.uses_rule(Rule::Schema));
}

#[test]
fn swapped_citations_are_rejected_at_line_10() {
    let src = source();
    let corrupted = read("tara/dnegelim.pls").replace("rule mp 6 9", "rule mp 9 6");
    let prover = Prover::new();
    let checker = Checker::new(&src, &prover);
    match checker.check_text("tara/dnegelim.pls", &corrupted) {
        Err(ScriptError::LineFailed { number, .. }) => assert_eq!(number, 10),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn every_bundled_script_checks() {
    let src = source();
    let prover = Prover::new();
    let checker = Checker::new(&src, &prover);
    for dir in ["tara", "kreisel", "polacik"] {
        for entry in std::fs::read_dir(format!("{}/scripts/{dir}", env!("CARGO_MANIFEST_DIR"))).unwrap() {
            let name = format!("{dir}/{}", entry.unwrap().file_name().to_string_lossy());
            checker.check(&name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

fn psi(body: &str) -> BTreeMap<String, Macro> {
    let m = Macro { params: vec![Variable::new("Y")], body: parse_formula(body).unwrap() };
    [("psi".to_string(), m)].into()
}

#[test]
fn kreisel_instances() {
    let src = source();
    let prover = Prover::new();
    for body in ["~Y \\/ ~~Y", "~~Y \\/ (~~Y -> Y)", "(~~Y -> Y) -> Y \\/ ~Y"] {
        let c = Checker::new(&src, &prover).with_overrides(psi(body));
        let r = c.check("kreisel/main.pls").unwrap_or_else(|e| panic!("{body}: {e}"));
        assert_eq!(r.derived().unwrap().to_string(), "~~P |- P");
    }
}

#[test]
fn override_violating_a_schema_is_rejected() {
    // Y does not satisfy |- ~~psi(Y)
    let src = source();
    let prover = Prover::new();
    let c = Checker::new(&src, &prover).with_overrides(psi("Y"));
    assert!(c.check("kreisel/main.pls").is_err());
}

#[test]
fn polacik_variants() {
    let src = source();
    let prover = Prover::new();
    let plain = Checker::new(&src, &prover);
    assert_eq!(plain.check("polacik/three.pls").unwrap().derived().unwrap().to_string(), "|- t(P) \\/ ~t(P)");
    assert_eq!(plain.check("polacik/main.pls").unwrap().derived().unwrap().to_string(), "~~P |- P");
    assert_eq!(
        plain.check("polacik/disjunction.pls").unwrap().derived().unwrap().to_string(),
        "|- ~~X \\/ (~~X -> X)"
    );
    let mut sig = Signature::new();
    sig.declare("t", 1).unwrap();
    let f = Macro { params: vec![Variable::new("X")], body: parse_formula_in("~t(X) \\/ ~~t(X)", &sig).unwrap() };
    let wlem = Checker::new(&src, &prover).with_overrides([("f".to_string(), f)].into());
    assert_eq!(wlem.check("polacik/main.pls").unwrap().derived().unwrap().to_string(), "~~P |- P");
}

#[test]
fn ipc_line_with_countermodel() {
    let src = MemorySource::new([("a.pls", "1 | P \\/ Q |- P | ipc\n")]);
    let prover = Prover::new();
    match Checker::new(&src, &prover).check("a.pls") {
        Err(ScriptError::LineFailed { number: 1, reason, .. }) => assert!(reason.contains("world"), "{reason}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_scripts_exit_2() {
    let prover = Prover::new();
    let cases = [
        "1 | P |- P\n",
        "1 | P |- P | frobnicate\n",
        "2 | P |- P | ipc\n1 | P |- P | ipc\n",
        "1 | P |- P | cut 1\n",
        "import missing.pls\n",
    ];
    for text in cases {
        let src = MemorySource::new([("a.pls", text)]);
        let e = Checker::new(&src, &prover).check("a.pls").unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text:?}: {e}");
    }
}

#[test]
fn import_cycle() {
    let src = MemorySource::new([("a.pls", "import b.pls\n"), ("b.pls", "import a.pls\n")]);
    let prover = Prover::new();
    let r = Checker::new(&src, &prover).check("a.pls");
    let e = r.unwrap_err();
    assert!(e.to_string().contains("cycle"), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn quantifier_rules_respect_eigenvariables() {
    let prover = Prover::new();
    let ok = "1 | Y /\\ Q |- Q | ipc\n2 | exists Y. Y /\\ Q |- Q | rule existsL 1\n";
    // Y is free in the conclusion, so it cannot be the eigenvariable
    let bad = "1 | Y /\\ Q |- Y | ipc\n2 | exists Y. Y /\\ Q |- Y | rule existsL 1\n";
    let src = MemorySource::new([("ok.pls", ok), ("bad.pls", bad)]);
    let c = Checker::new(&src, &prover);
    let r = c.check("ok.pls");
    assert!(r.is_ok(), "{r:?}");
    assert!(matches!(c.check("bad.pls"), Err(ScriptError::LineFailed { number: 2, .. })));
}
