use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use pittslab::ipc::Prover;
use pittslab::lab::replay;
use pittslab::pitts::{pita_forall, pite_exists};
use pittslab::{parse_formula, Sequent, Variable};
use pittslab_bench::{INTERPOLATION_BODIES, SEQUENTS};

fn prover(c: &mut Criterion) {
    let mut g = c.benchmark_group("prove");
    for (i, s) in SEQUENTS.iter().enumerate() {
        let seq = Sequent::parse(s).unwrap();
        g.bench_function(format!("sequent-{i}"), |b| {
            // a fresh prover each time so the cache does not hide the search
            b.iter(|| Prover::new().prove_bounded(black_box(&seq), 6).unwrap())
        });
    }
    g.finish();
}

fn interpolation(c: &mut Criterion) {
    let mut g = c.benchmark_group("interpolate");
    for (i, (body, var)) in INTERPOLATION_BODIES.iter().enumerate() {
        let phi = parse_formula(body).unwrap();
        let y = Variable::new(var);
        g.bench_function(format!("exists-{i}"), |b| b.iter(|| pite_exists(black_box(&phi), &y).unwrap()));
        g.bench_function(format!("forall-{i}"), |b| b.iter(|| pita_forall(black_box(&phi), &y).unwrap()));
    }
    g.finish();
}

fn scripts(c: &mut Criterion) {
    let mut g = c.benchmark_group("replay");
    for name in ["tara", "kreisel", "polacik"] {
        g.bench_function(name, |b| b.iter(|| replay(black_box(name)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, prover, interpolation, scripts);
criterion_main!(benches);
