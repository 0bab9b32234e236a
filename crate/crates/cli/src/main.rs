use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pittslab::ipc::kripke::MAX_WORLDS;
use pittslab::ipc::{Prover, Witness};
use pittslab::lab::{self, connective, rn, LabError};
use pittslab::pitts::{pita_forall, pite_exists, probe_corpus, validate_with, ValidationReport};
use pittslab::script::{Checker, DirSource, ScriptReport};
use pittslab::selftest;
use pittslab::{check_tree, parse_formula, ProofTree, SchemaTheory, Sequent, Signature, Variable};

#[derive(Parser)]
#[command(name = "pittslab", version, about = "Intuitionistic logic workbench")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest countermodel searched, in worlds.
    #[arg(long, default_value_t = 6, global = true, value_parser = parse_bound)]
    bound: usize,
    /// Levels of the one-variable lattice to enumerate.
    #[arg(long, default_value_t = 12, global = true, value_parser = clap::value_parser!(u16).range(1..=64))]
    rn_level: u16,
    /// Node budget of the probe corpus used by `--validate`.
    #[arg(long, default_value_t = 8, global = true, value_parser = clap::value_parser!(u16).range(1..=11))]
    probe_size: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_bound(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=MAX_WORLDS).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between 1 and {MAX_WORLDS}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide an intuitionistic sequent; exit 0 if provable, 1 if not.
    Prove { sequent: String },
    /// Eliminate a propositional quantifier.
    #[command(group(ArgGroup::new("quantifier").required(true).args(["exists", "forall"])))]
    Interpolate {
        #[arg(long)]
        exists: bool,
        #[arg(long)]
        forall: bool,
        #[arg(long)]
        var: String,
        /// Check the defining property against the probe corpus.
        #[arg(long)]
        validate: bool,
        formula: String,
    },
    /// Check a proof script.
    Check { file: PathBuf },
    /// Read an auxiliary formula off a cut-free proof tree.
    ExtractAux {
        tree: PathBuf,
        #[arg(long)]
        body: String,
        #[arg(long)]
        var: String,
    },
    /// Locate a one-variable formula in the lattice.
    RnClassify { formula: String },
    /// Replay a bundled script suite.
    Replay { name: String },
    /// Run the seeded property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Printed result plus exit code.
struct Outcome {
    text: String,
    json: Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
            };
            // a closed pipe downstream is not our failure
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(out.code)
        }
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type Run = Result<Outcome, (String, u8)>;

fn bad(msg: impl std::fmt::Display) -> (String, u8) {
    (msg.to_string(), 2)
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Prove { sequent } => prove(sequent, cli.bound),
        Command::Interpolate { exists, var, validate, formula, .. } => {
            interpolate(formula, var, *exists, validate.then_some(cli.probe_size as usize))
        }
        Command::Check { file } => check(file),
        Command::ExtractAux { tree, body, var } => extract(tree, body, var),
        Command::RnClassify { formula } => classify(formula, cli.rn_level as usize),
        Command::Replay { name } => replay(name),
        Command::Selftest { seed } => self_test(*seed),
    }
}

fn prove(text: &str, bound: usize) -> Run {
    let s = Sequent::parse(text).map_err(bad)?;
    let v = Prover::new().prove_bounded(&s, bound).map_err(bad)?;
    let seq = s.to_string();
    Ok(match v.witness {
        Witness::Proof(t) => {
            check_tree(&t, &SchemaTheory::empty()).map_err(|e| (format!("internal: prover tree rejected: {e}"), 2))?;
            Outcome {
                text: format!("provable: {seq}\n{t}"),
                json: json!({"sequent": seq, "provable": true, "proof": t.to_json_value_untyped()}),
                code: 0,
            }
        }
        Witness::Countermodel { model, world } => Outcome {
            text: format!("refuted: {seq}\ncountermodel (refuted at world {world}):\n{model}"),
            json: json!({"sequent": seq, "provable": false, "countermodel": model.to_json(), "world": world}),
            code: 1,
        },
        Witness::Unknown { bound } => Outcome {
            text: format!("refuted: {seq}\nno countermodel with at most {bound} worlds\n"),
            json: json!({"sequent": seq, "provable": false, "countermodel": null}),
            code: 1,
        },
    })
}

fn report_json(r: &ValidationReport) -> Value {
    serde_json::to_value(r).expect("json")
}

fn interpolate(text: &str, var: &str, existential: bool, probes: Option<usize>) -> Run {
    let phi = parse_formula(text).map_err(bad)?;
    if !Variable::is_identifier(var) {
        return Err(bad(format!("bad variable `{var}`")));
    }
    let y = Variable::new(var);
    let result = if existential { pite_exists(&phi, &y) } else { pita_forall(&phi, &y) }.map_err(bad)?;
    let quant = if existential { "exists" } else { "forall" };
    let mut text = format!("{result}\n");
    let mut json = json!({"quantifier": quant, "var": var, "input": phi.to_string(), "interpolant": result.to_string()});
    let mut code = 0;
    if let Some(n) = probes {
        let atoms: Vec<Variable> = phi.free_vars().into_iter().filter(|v| *v != y).collect();
        let corpus = probe_corpus(&atoms, n);
        let r = validate_with(&Prover::new(), &phi, &y, &result, &corpus, existential).map_err(bad)?;
        text.push_str(&format!(
            "validation: {} ({} probes, {} violations)\n",
            if r.passed() { "passed" } else { "FAILED" },
            r.probes_checked,
            r.violations.len()
        ));
        for v in &r.violations {
            text.push_str(&format!("  probe {}: candidate {} body {}\n", v.probe, v.candidate_side, v.body_side));
        }
        if !r.passed() {
            code = 1;
        }
        json["validation"] = report_json(&r);
    }
    Ok(Outcome { text, json, code })
}

fn script_json(r: &ScriptReport) -> Value {
    let lines: Vec<Value> = r
        .lines
        .iter()
        .map(|l| {
            json!({
                "number": l.number,
                "sequent": l.sequent.to_string(),
                "justification": l.justification,
                "nodes": l.report.nodes,
                "cuts": l.report.cuts,
                "schema_uses": l.report.schema_uses,
            })
        })
        .collect();
    json!({
        "file": r.file,
        "lines": lines,
        "derived": r.derived().map(|s| s.to_string()),
    })
}

fn check(path: &Path) -> Run {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| bad("no file name"))?.to_string_lossy().into_owned();
    let src = DirSource::new(dir);
    let prover = Prover::new();
    let checker = Checker::new(&src, &prover);
    match checker.check(&name) {
        Ok(r) => {
            let mut text = r.to_string();
            if let Some(d) = r.derived() {
                text.push_str(&format!("derived: {d}\n"));
            }
            Ok(Outcome { text, json: script_json(&r), code: 0 })
        }
        Err(e) => Err((e.to_string(), e.exit_code() as u8)),
    }
}

fn lab_err(e: LabError) -> (String, u8) {
    let code = match e {
        LabError::NotCutFree
        | LabError::NoEligibleRule(_)
        | LabError::DisjunctionNeeded
        | LabError::LevelExceeded(_)
        | LabError::HypothesisFails(_) => 1,
        _ => 2,
    };
    (e.to_string(), code)
}

fn extract(tree: &Path, body: &str, var: &str) -> Run {
    let text = std::fs::read_to_string(tree).map_err(|e| bad(format!("{}: {e}", tree.display())))?;
    let t = ProofTree::from_json(&text, &Signature::new()).map_err(bad)?;
    let c = connective::connective_from_text(body, var).map_err(lab_err)?;
    let ex = lab::extract_auxiliary(&t, &c).map_err(lab_err)?;
    let path: Vec<&str> = ex.path.iter().map(|r| r.name()).collect();
    let r = &ex.report;
    let out = format!(
        "candidate: {}\npath: {}\ninterpolant: {}\ndefinition: {}\nauxiliary: {}\n",
        ex.candidate,
        path.join(" "),
        r.interpolant,
        r.definition,
        r.holds
    );
    let mut json = r.to_json_value();
    json["path"] = json!(path);
    Ok(Outcome { text: out, json, code: if r.holds { 0 } else { 1 } })
}

fn classify(text: &str, level: usize) -> Run {
    let f = parse_formula(text).map_err(bad)?;
    let c = rn::rn_classify(&f, level).map_err(lab_err)?;
    Ok(Outcome {
        text: format!("{}: {}\n", c.level, c.representative),
        json: json!({"formula": f.to_string(), "level": c.level.to_string(), "representative": c.representative.to_string()}),
        code: 0,
    })
}

fn replay(name: &str) -> Run {
    let r = lab::replay(name).map_err(|e| (e.to_string(), e.exit_code() as u8))?;
    let mut text = String::new();
    for s in &r.scripts {
        text.push_str(&format!("{}: {} lines, {}\n", s.file, s.lines, s.status));
    }
    for f in &r.lower_facts {
        let ok = if f.all_hold() { "ok" } else { "FAILED" };
        text.push_str(&format!("psi(Y) := {} [{}]: lower facts {ok}\n", f.psi, f.class));
    }
    for d in &r.derived {
        text.push_str(&format!("derived: {d}\n"));
    }
    let code = if r.lower_facts.iter().all(|f| f.all_hold()) { 0 } else { 1 };
    Ok(Outcome { text, json: serde_json::to_value(&r).expect("json"), code })
}

fn self_test(seed: u64) -> Run {
    let r = selftest::run_all(seed, selftest::Sizes::default()).map_err(bad)?;
    let mut text = String::new();
    for s in &r.suites {
        let status = if s.passed() { "ok" } else { "FAILED" };
        text.push_str(&format!("{}: {} cases, {} failures, {status}\n", s.name, s.cases, s.failures.len()));
        for f in &s.failures {
            text.push_str(&format!("  {f}\n"));
        }
    }
    Ok(Outcome { text, json: serde_json::to_value(&r).expect("json"), code: if r.passed() { 0 } else { 1 } })
}
