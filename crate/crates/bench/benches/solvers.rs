use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use satchain_bench::scenario;
use satchain_core::{build_model, dco, gco, nfco, solve_exact, SolveLimits, TieBreak};

fn heuristics(c: &mut Criterion) {
    let mut group = c.benchmark_group("heuristics");
    for n in [5, 10, 20, 30] {
        let sc = scenario(n, 1);
        group.bench_with_input(BenchmarkId::new("gco", n), &sc, |b, sc| b.iter(|| gco(black_box(sc))));
        group.bench_with_input(BenchmarkId::new("nfco", n), &sc, |b, sc| b.iter(|| nfco(black_box(sc))));
        group.bench_with_input(BenchmarkId::new("dco", n), &sc, |b, sc| b.iter(|| dco(black_box(sc))));
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    let limits = SolveLimits { node_limit: 200_000, tie_break: TieBreak::FirstFound, ..Default::default() };
    for n in [4, 6, 8] {
        let sc = scenario(n, 1);
        let model = build_model(&sc).unwrap();
        group.bench_with_input(BenchmarkId::new("solve_exact", n), &(sc, model), |b, (sc, model)| {
            b.iter(|| solve_exact(black_box(sc), model, &limits).unwrap())
        });
    }
    let sc = scenario(10, 1);
    group.bench_function("build_model/10", |b| b.iter(|| build_model(black_box(&sc)).unwrap()));
    group.finish();
}

criterion_group!(benches, heuristics, exact);
criterion_main!(benches);
