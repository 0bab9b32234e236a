//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the summary is always printed.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pittslab::ipc::{equivalent, Prover};
use pittslab::lab::connective::{bundled_trees, is_auxiliary};
use pittslab::lab::{extract_auxiliary, rn_classify, RnLevel};
use pittslab::pitts::{pite_exists, probe_corpus, validate_interpolant};
use pittslab::selftest::{glivenko, interpolation_invariants, prover_oracle};
use pittslab::{parse_formula, Formula, ProofTree, Signature, Variable};

type Check = Result<String, String>;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn cli(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_pittslab")).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

const BODIES: [(&str, &str); 5] = [
    ("(~Y -> X1) /\\ (~~Y -> X2)", "(~X1 -> X2) /\\ (~X2 -> X1)"),
    ("(Y \\/ ~Y) -> P /\\ Q", "~~(P /\\ Q)"),
    ("P <-> ~Y \\/ ~~Y", "~~P"),
    ("(P -> Y \\/ ~Y) -> P", "~~P"),
    ("(X -> ~Y \\/ ~~Y) -> X", "~~X"),
];

fn interpolant_regressions() -> Check {
    let mut worst = Duration::ZERO;
    for (body, want) in BODIES {
        let t = Instant::now();
        let (code, out) = cli(&["interpolate", "--exists", "--var", "Y", body]);
        let took = t.elapsed();
        worst = worst.max(took);
        if code != 0 {
            return Err(format!("{body}: exit {code}"));
        }
        let got = parse_formula(out.trim()).map_err(|e| format!("{body}: {e}"))?;
        if !equivalent(&got, &f(want)).unwrap() {
            return Err(format!("{body}: got {got}, expected {want}"));
        }
        if took > Duration::from_secs(30) {
            return Err(format!("{body}: {took:?}"));
        }
    }
    Ok(format!("5 bodies, slowest {worst:.2?}"))
}

fn replay_suites() -> Check {
    let mut worst = Duration::ZERO;
    let expect = [
        ("tara", "~~P |- P"),
        ("kreisel", "~~P |- P"),
        ("polacik", "~~P |- P"),
        ("polacik-wlem", "~~P |- P"),
        ("polacik-disjunction", "|- ~~X \\/ (~~X -> X)"),
    ];
    for (name, last) in expect {
        let t = Instant::now();
        let (code, out) = cli(&["replay", name]);
        let took = t.elapsed();
        worst = worst.max(took);
        if code != 0 || took > Duration::from_secs(10) {
            return Err(format!("{name}: exit {code} in {took:?}"));
        }
        if out.lines().last() != Some(&format!("derived: {last}")) {
            return Err(format!("{name}: ends with {:?}", out.lines().last()));
        }
        if name == "kreisel" {
            for psi in ["~Y \\/ ~~Y", "~~Y \\/ (~~Y -> Y)", "(~~Y -> Y) -> Y \\/ ~Y"] {
                if !out.contains(&format!("kreisel/main.pls [psi(Y) := {psi}]: ")) {
                    return Err(format!("kreisel: no run for {psi}"));
                }
            }
            if out.matches("derived: ~~P |- P").count() != 4 {
                return Err("kreisel: not every run derives ~~P |- P".into());
            }
        }
    }
    let (code, out) = cli(&["replay", "tara-props"]);
    let props = [
        "exists Y. (~Y -> P) /\\ (~~Y -> Q) |- exists Y. (~Y -> Q) /\\ (~~Y -> P)",
        "Q -> Q2, exists Y. (~Y -> P) /\\ (~~Y -> Q) |- exists Y. (~Y -> P) /\\ (~~Y -> Q2)",
        "exists Y. ~~Y /\\ (~~Y -> P) |- P",
        "P |- exists Y. ~~Y /\\ (~~Y -> P)",
        "|- exists Y. (~Y -> ~P) /\\ (~~Y -> ~~P)",
        "|- (exists Y. (~Y -> P) /\\ (~~Y -> Q)) -> o(P, Q)",
        "|- (exists Y. (~Y -> P) /\\ (~~Y -> Q)) -> ~P -> Q",
    ];
    let derived: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix("derived: ")).collect();
    if code != 0 || derived != props {
        return Err(format!("tara-props: exit {code}, derived {derived:?}"));
    }
    Ok(format!("6 suites, slowest {worst:.2?}"))
}

fn monstrous_sequent() -> Check {
    let s = "|- ((P \\/ (P -> (Q \\/ ~Q))) -> (Q \\/ ~Q)) -> (P \\/ (P -> (Q \\/ ~Q)))";
    let t = Instant::now();
    let (code, out) = cli(&["prove", s]);
    let took = t.elapsed();
    if code == 0 && out.starts_with("provable") && took < Duration::from_secs(5) {
        Ok(format!("provable, kernel-checked tree, {took:.2?}"))
    } else {
        Err(format!("exit {code} in {took:?}"))
    }
}

fn prover_oracle_suite() -> Check {
    let r = prover_oracle(0, 500).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(format!("{} formulas, 0 violations", r.cases))
    } else {
        Err(format!("{} violations, first: {}", r.failures.len(), r.failures[0]))
    }
}

fn glivenko_suite() -> Check {
    let r = glivenko(0, 200).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(format!("{} formulas agree", r.cases))
    } else {
        Err(format!("{} disagreements, first: {}", r.failures.len(), r.failures[0]))
    }
}

fn probe_gate() -> Check {
    let y = Variable::new("Y");
    let mut probes = 0;
    for (body, _) in BODIES {
        let phi = f(body);
        let e = pite_exists(&phi, &y).map_err(|e| e.to_string())?;
        let atoms: Vec<Variable> = phi.free_vars().into_iter().filter(|v| *v != y).collect();
        let r = validate_interpolant(&phi, &y, &e, &probe_corpus(&atoms, 8)).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{body}: {} violations", r.violations.len()));
        }
        probes += r.probes_checked;
    }
    let inv = interpolation_invariants(0, 100).map_err(|e| e.to_string())?;
    if !inv.passed() {
        return Err(format!("invariants: {}", inv.failures[0]));
    }
    Ok(format!("{probes} probes, 0 violations; {} invariant pairs", inv.cases))
}

fn rieger_nishimura() -> Check {
    let p = Prover::new();
    let listed = ["~X \\/ ~~X", "~~X \\/ (~~X -> X)", "(~~X -> X) -> X \\/ ~X"];
    let classes: Vec<RnLevel> = listed
        .iter()
        .map(|s| rn_classify(&f(s), 12).map(|c| c.level))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for i in 0..3 {
        for j in 0..i {
            if classes[i] == classes[j] {
                return Err(format!("{} and {} share a class", listed[i], listed[j]));
            }
        }
    }
    // the first lies strictly below the other two
    let wlem = f(listed[0]);
    for s in &listed[1..] {
        let g = f(s);
        let up = p.entails(std::slice::from_ref(&wlem), &g).unwrap();
        let down = p.entails(std::slice::from_ref(&g), &wlem).unwrap();
        if !up || down {
            return Err(format!("{} < {s} not certified", listed[0]));
        }
    }
    let (a, b) = (f(listed[1]), f(listed[2]));
    let comparable = p.entails(std::slice::from_ref(&a), &b).unwrap() || p.entails(std::slice::from_ref(&b), &a).unwrap();
    let neg3 = rn_classify(&f("~~~X"), 12).map_err(|e| e.to_string())?.level;
    let neg = rn_classify(&f("~X"), 12).map_err(|e| e.to_string())?.level;
    if neg3 != neg {
        return Err(format!("~~~X in {neg3}, ~X in {neg}"));
    }
    let shown: Vec<String> = classes.iter().map(ToString::to_string).collect();
    Ok(format!(
        "classes {}; {} strictly below both; last two {}; ~~~X in {neg3} with ~X",
        shown.join(", "),
        classes[0],
        if comparable { "comparable" } else { "incomparable" }
    ))
}

fn extraction() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/trees");
    let expected = ["bot", "P /\\ Q", "X2"];
    let t = Instant::now();
    let mut got = Vec::new();
    for ((name, c, _), want) in bundled_trees().into_iter().zip(expected) {
        let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        let tree = ProofTree::from_json(&text, &Signature::new()).map_err(|e| e.to_string())?;
        let ex = extract_auxiliary(&tree, &c).map_err(|e| format!("{name}: {e}"))?;
        if ex.candidate != f(want) {
            return Err(format!("{name}: got {}, expected {want}", ex.candidate));
        }
        if !is_auxiliary(&c, &ex.candidate).map_err(|e| e.to_string())?.holds {
            return Err(format!("{name}: {} is not auxiliary", ex.candidate));
        }
        got.push(ex.candidate.to_string());
    }
    if t.elapsed() > Duration::from_secs(10) {
        return Err(format!("took {:?}", t.elapsed()));
    }
    Ok(format!("candidates {}; all auxiliary", got.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("interpolant regressions", interpolant_regressions),
        ("replay suites", replay_suites),
        ("monstrous sequent", monstrous_sequent),
        ("prover/oracle properties", prover_oracle_suite),
        ("Glivenko agreement", glivenko_suite),
        ("interpolation probe gate", probe_gate),
        ("one-variable lattice", rieger_nishimura),
        ("auxiliary extraction", extraction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = check();
        let took = t.elapsed();
        match r {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
