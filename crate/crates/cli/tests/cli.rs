use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pittslab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

fn tree(name: &str) -> String {
    core_dir().join("trees").join(format!("{name}.json")).to_string_lossy().into_owned()
}

struct LocalSchemas;

impl jsonschema::Retrieve for LocalSchemas {
    fn retrieve(&self, uri: &jsonschema::Uri<String>) -> Result<Value, Box<dyn std::error::Error + Send + Sync>> {
        let name = uri.path().as_str().rsplit('/').next().unwrap_or_default().to_string();
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

fn assert_valid(schema_file: &str, args: &[&str]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::options().with_retriever(LocalSchemas).build(&schema).unwrap();
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
}

#[test]
fn prove_exit_codes() {
    assert_eq!(run(&["prove", "|- P -> P"]).status.code(), Some(0));
    let o = run(&["prove", "|- P \\/ ~P"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("countermodel"));
    assert_eq!(run(&["prove", "|- P ->"]).status.code(), Some(2));
    assert_eq!(run(&["prove", "|- exists Y. Y"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["prove", "--no-such-flag", "|- P"]).status.code(), Some(2));
    assert_eq!(run(&["--bound", "0", "prove", "|- P"]).status.code(), Some(2));
    assert_eq!(run(&["interpolate", "--var", "Y", "Y"]).status.code(), Some(2));
    assert_eq!(run(&["interpolate", "--exists", "--forall", "--var", "Y", "Y"]).status.code(), Some(2));
    let o = run(&["replay", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn interpolate_realizability_body() {
    let o = run(&["interpolate", "--exists", "--var", "Y", "(~Y -> X1) /\\ (~~Y -> X2)", "--validate"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let f = pittslab::parse_formula(&first).unwrap();
    let want = pittslab::parse_formula("(~X1 -> X2) /\\ (~X2 -> X1)").unwrap();
    assert!(pittslab::ipc::equivalent(&f, &want).unwrap());
}

#[test]
fn replay_tara_ends_with_double_negation_elimination() {
    let o = run(&["replay", "tara"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("derived: ~~P |- P"));
}

#[test]
fn check_script_and_rejected_line() {
    let good = core_dir().join("scripts/tara/dnegelim.pls");
    let o = run(&["check", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).ends_with("derived: ~~P |- P\n"));

    let dir = std::env::temp_dir().join(format!("pittslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for entry in std::fs::read_dir(core_dir().join("scripts/tara")).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.join(p.file_name().unwrap())).unwrap();
    }
    let text = std::fs::read_to_string(dir.join("dnegelim.pls")).unwrap();
    std::fs::write(dir.join("bad.pls"), text.replace("rule mp 6 9", "rule mp 9 6")).unwrap();
    let o = run(&["check", dir.join("bad.pls").to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 10"));
}

#[test]
fn extract_aux_bundled_trees() {
    for (name, body, cand) in [
        ("weaken-right", "(X /\\ ~X) /\\ Y", "bot"),
        ("exists-right", "(Y \\/ ~Y) -> P /\\ Q", "P /\\ Q"),
        ("imp-left", "X1 /\\ (X1 -> Y) /\\ (Y -> X2)", "X2"),
    ] {
        let o = run(&["extract-aux", &tree(name), "--body", body, "--var", "Y"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).starts_with(&format!("candidate: {cand}\n")), "{name}");
    }
}

#[test]
fn rn_classify_output() {
    assert_eq!(stdout(&run(&["rn-classify", "~~~X"])), stdout(&run(&["rn-classify", "~X"])));
    assert_eq!(run(&["--rn-level", "3", "rn-classify", "~~X -> X"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 4] = [
        &["prove", "|- ((P -> Q) -> P) -> P"],
        &["--format", "json", "interpolate", "--forall", "--var", "Y", "X \\/ (Y -> Z)"],
        &["replay", "kreisel"],
        &["--format", "json", "prove", "|- ~~(P \\/ ~P)"],
    ];
    for args in cases {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn json_matches_schemas() {
    assert_valid("prove.schema.json", &["prove", "|- ((P -> Q) -> P) -> ~~P"]);
    assert_valid("prove.schema.json", &["prove", "|- ((P -> Q) -> P) -> P"]);
    assert_valid("interpolate.schema.json", &["interpolate", "--exists", "--var", "Y", "--validate", "--probe-size", "5", "Y /\\ (Y -> Q)"]);
    let script = core_dir().join("scripts/polacik/main.pls");
    assert_valid("check.schema.json", &["check", script.to_str().unwrap()]);
    assert_valid("extract-aux.schema.json", &["extract-aux", &tree("imp-left"), "--body", "X1 /\\ (X1 -> Y) /\\ (Y -> X2)", "--var", "Y"]);
    assert_valid("rn-classify.schema.json", &["rn-classify", "~X \\/ ~~X"]);
    assert_valid("replay.schema.json", &["replay", "kreisel"]);
    assert_valid("replay.schema.json", &["replay", "tara-props"]);
    assert_valid("selftest.schema.json", &["selftest", "--seed", "5"]);
}

#[test]
fn tree_files_match_schema() {
    let schema: Value =
        serde_json::from_str(include_str!("../schemas/proof-tree.schema.json")).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    for name in ["weaken-right", "exists-right", "imp-left"] {
        let t: Value = serde_json::from_str(&std::fs::read_to_string(tree(name)).unwrap()).unwrap();
        assert!(v.is_valid(&t), "{name}");
    }
}
