use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mdlconf_bench::relay_chain;
use mdlconf_core::solver::solve;
use mdlconf_core::SolverConfig;

fn chains(c: &mut Criterion) {
    let config = SolverConfig::default();
    let mut group = c.benchmark_group("relay_chain");
    for n in [2, 8, 32] {
        let cs = relay_chain(n);
        group.bench_function(n.to_string(), |b| b.iter(|| solve(black_box(&cs), &config)));
    }
    group.finish();
}

criterion_group!(benches, chains);
criterion_main!(benches);
