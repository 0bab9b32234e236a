//! Named suites over the bundled proof scripts.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::formula::{Macro, Signature, Variable};
use crate::ipc::Prover;
use crate::script::{Checker, DirSource, MemorySource, ScriptError, ScriptReport, ScriptSource};
use crate::syntax::parse_formula_in;

use super::rn::{check_rieger_lower_facts, LowerFacts};
use super::LabError;

/// Environment variable naming a directory to read scripts from instead of
/// the copies compiled into the library.
pub const SCRIPT_DIR_VAR: &str = "PITTSLAB_SCRIPT_DIR";

macro_rules! bundled {
    ($($path:literal),* $(,)?) => {
        [$(($path, include_str!(concat!("../../scripts/", $path)))),*]
    };
}

const BUNDLED: [(&str, &str); 16] = bundled![
    "tara/theory.pls",
    "tara/topreducts.pls",
    "tara/negtopreducts.pls",
    "tara/implication.pls",
    "tara/topswitch.pls",
    "tara/fulcrum.pls",
    "tara/dnegelim.pls",
    "tara/props.pls",
    "kreisel/theory.pls",
    "kreisel/trivium.pls",
    "kreisel/quadrivium.pls",
    "kreisel/main.pls",
    "polacik/theory.pls",
    "polacik/three.pls",
    "polacik/main.pls",
    "polacik/disjunction.pls",
];

pub fn bundled_scripts() -> MemorySource {
    MemorySource::new(BUNDLED)
}

/// The bundled scripts, or the directory named by [`SCRIPT_DIR_VAR`].
pub fn script_source() -> Box<dyn ScriptSource> {
    match std::env::var_os(SCRIPT_DIR_VAR) {
        Some(dir) => Box::new(DirSource::new(dir)),
        None => Box::new(bundled_scripts()),
    }
}

pub const SUITES: [&str; 6] =
    ["tara", "tara-props", "kreisel", "polacik", "polacik-wlem", "polacik-disjunction"];

/// Instances of the abstract `psi` replayed by the `kreisel` suite.
pub const PSI_INSTANCES: [&str; 3] = ["~Y \\/ ~~Y", "~~Y \\/ (~~Y -> Y)", "(~~Y -> Y) -> Y \\/ ~Y"];

/// Replacement for the abstract `f` in the `polacik-wlem` suite.
pub const WLEM_F: &str = "~t(X) \\/ ~~t(X)";

#[derive(Clone, Debug, Serialize)]
pub struct ScriptStatus {
    pub file: String,
    pub lines: usize,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub name: String,
    pub scripts: Vec<ScriptStatus>,
    /// Sequents established by the suite, in order; the last is the main
    /// result.
    pub derived: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lower_facts: Vec<LowerFacts>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("unknown suite `{0}`; available: {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{script}: line {line} failed: {reason}")]
    ScriptFailed { script: String, line: usize, reason: String },
    #[error(transparent)]
    Script(ScriptError),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl ReplayError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReplayError::ScriptFailed { .. } => 1,
            ReplayError::Lab(LabError::HypothesisFails(_)) => 1,
            _ => 2,
        }
    }
}

impl From<ScriptError> for ReplayError {
    fn from(e: ScriptError) -> Self {
        match e {
            ScriptError::LineFailed { file, number, reason } => {
                ReplayError::ScriptFailed { script: file, line: number, reason }
            }
            other => ReplayError::Script(other),
        }
    }
}

struct Run<'a> {
    /// Label shown next to each file, for runs with overrides.
    label: Option<String>,
    overrides: BTreeMap<String, Macro>,
    files: &'a [&'a str],
    /// Lines whose sequents are reported; the last line when empty.
    claims: &'a [usize],
}

fn macro_of(param: &str, body: &str, sig: &Signature) -> Result<Macro, LabError> {
    let body = parse_formula_in(body, sig).map_err(|e| LabError::InvalidBody(e.to_string()))?;
    Ok(Macro { params: vec![Variable::new(param)], body })
}

/// Replays suite `name` against the scripts from [`script_source`].
pub fn replay(name: &str) -> Result<ReplayReport, ReplayError> {
    let source = script_source();
    replay_from(name, source.as_ref())
}

pub fn replay_from(name: &str, source: &dyn ScriptSource) -> Result<ReplayReport, ReplayError> {
    let plain = |files: &'static [&'static str], claims: &'static [usize]| Run {
        label: None,
        overrides: BTreeMap::new(),
        files,
        claims,
    };
    const TARA: [&str; 6] = [
        "tara/topreducts.pls",
        "tara/negtopreducts.pls",
        "tara/implication.pls",
        "tara/topswitch.pls",
        "tara/fulcrum.pls",
        "tara/dnegelim.pls",
    ];
    const KREISEL: [&str; 3] = ["kreisel/trivium.pls", "kreisel/quadrivium.pls", "kreisel/main.pls"];
    const POLACIK: [&str; 2] = ["polacik/three.pls", "polacik/main.pls"];
    let mut lower_facts = Vec::new();
    let runs: Vec<Run> = match name {
        "tara" => vec![plain(&TARA, &[])],
        "tara-props" => vec![plain(&["tara/props.pls"], &[3, 6, 8, 10, 12, 20, 23])],
        "kreisel" => {
            let mut runs = vec![plain(&KREISEL, &[])];
            for body in PSI_INSTANCES {
                let m = macro_of("Y", body, &Signature::new())?;
                lower_facts.push(check_rieger_lower_facts(&m.body, &Variable::new("Y"), 12)?);
                runs.push(Run {
                    label: Some(format!("psi(Y) := {body}")),
                    overrides: [("psi".to_string(), m)].into(),
                    files: &KREISEL,
                    claims: &[],
                });
            }
            runs
        }
        "polacik" => vec![plain(&POLACIK, &[])],
        "polacik-wlem" => {
            let mut sig = Signature::new();
            sig.declare("t", 1).expect("fresh signature");
            let m = macro_of("X", WLEM_F, &sig)?;
            vec![Run {
                label: Some(format!("f(X) := {WLEM_F}")),
                overrides: [("f".to_string(), m)].into(),
                files: &POLACIK,
                claims: &[],
            }]
        }
        "polacik-disjunction" => vec![plain(&["polacik/disjunction.pls"], &[])],
        other => return Err(ReplayError::UnknownSuite(other.to_string())),
    };
    let prover = Prover::new();
    let mut scripts = Vec::new();
    let mut derived = Vec::new();
    for run in runs {
        let checker = Checker::new(source, &prover).with_overrides(run.overrides.clone());
        for file in run.files {
            let report = checker.check(file)?;
            collect(&report, run.claims, &mut derived);
            scripts.push(ScriptStatus {
                file: match &run.label {
                    Some(l) => format!("{file} [{l}]"),
                    None => file.to_string(),
                },
                lines: report.lines.len(),
                status: "ok".to_string(),
            });
        }
    }
    Ok(ReplayReport { name: name.to_string(), scripts, derived, lower_facts })
}

fn collect(report: &ScriptReport, claims: &[usize], out: &mut Vec<String>) {
    if claims.is_empty() {
        if let Some(s) = report.derived() {
            out.push(s.to_string());
        }
    } else {
        for n in claims {
            if let Some(l) = report.line(*n) {
                out.push(l.sequent.to_string());
            }
        }
    }
}

impl ReplayReport {
    /// The main result of the suite.
    pub fn conclusion(&self) -> Option<&str> {
        self.derived.last().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_replays() {
        for s in SUITES {
            let r = replay_from(s, &bundled_scripts()).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(r.scripts.iter().all(|x| x.status == "ok"));
            assert!(!r.derived.is_empty(), "{s}");
        }
    }

    #[test]
    fn main_results() {
        let src = bundled_scripts();
        for s in ["tara", "kreisel", "polacik", "polacik-wlem"] {
            assert_eq!(replay_from(s, &src).unwrap().conclusion(), Some("~~P |- P"), "{s}");
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(replay_from("nope", &bundled_scripts()), Err(ReplayError::UnknownSuite(_))));
    }
}
