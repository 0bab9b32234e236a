use std::time::Instant;

use pittslab::pitts::{pite_exists, pite_raw, probe_corpus, validate_interpolant};
use pittslab::{ipc, parse_formula, Variable};

fn main() {
    let cases = [
        ("(~Y -> X1) /\\ (~~Y -> X2)", "(~X1 -> X2) /\\ (~X2 -> X1)"),
        ("(Y \\/ ~Y) -> P /\\ Q", "~~(P /\\ Q)"),
        ("P <-> ~Y \\/ ~~Y", "~~P"),
        ("(P -> Y \\/ ~Y) -> P", "~~P"),
        ("(X -> ~Y \\/ ~~Y) -> X", "~~X"),
    ];
    let y = Variable::new("Y");
    for (body, expected) in cases {
        let t = Instant::now();
        let phi = parse_formula(body).unwrap();
        let raw = pite_raw(&phi, &y).unwrap();
        let e = pite_exists(&phi, &y).unwrap();
        let ok = ipc::equivalent(&e, &parse_formula(expected).unwrap()).unwrap();
        println!("{body}: raw size {} -> {e}  [{ok}] {:?}", raw.size(), t.elapsed());
        let atoms: Vec<Variable> = phi.free_vars().into_iter().filter(|v| *v != y).collect();
        let probes = probe_corpus(&atoms, 8);
        let t = Instant::now();
        let r = validate_interpolant(&phi, &y, &e, &probes).unwrap();
        println!("   probes {} passed {} in {:?}", r.probes_checked, r.passed(), t.elapsed());
    }
}
