//! Parallel versus sequential dispatch for the batch entry points. Without
//! the `parallel` feature both arms run sequentially.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use trace_kit::dirichlet::enumerate_characters;
use trace_kit::hecke_operator::{verify_abc_battery, verify_abc_battery_sequential};
use trace_kit::trace_formulas::{trace_batch, trace_batch_sequential, TraceQuery};

fn queries() -> Vec<TraceQuery> {
    let mut out = Vec::new();
    for level in [11u64, 13, 15] {
        for chi in enumerate_characters(level) {
            for n in 1..=40 {
                out.push(TraceQuery::new(
                    chi.clone(),
                    2 + (chi.parity() < 0) as u32,
                    n,
                ));
            }
        }
    }
    out
}

fn traces(c: &mut Criterion) {
    let qs = queries();
    let mut g = c.benchmark_group("trace_batch");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| trace_batch(black_box(&qs))));
    g.bench_function("sequential", |b| {
        b.iter(|| trace_batch_sequential(black_box(&qs)))
    });
    g.finish();
}

fn operators(c: &mut Criterion) {
    let ns: Vec<u64> = (1..=10).collect();
    let mut g = c.benchmark_group("verify_abc_battery");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| verify_abc_battery(black_box(&ns)))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| verify_abc_battery_sequential(black_box(&ns)))
    });
    g.finish();
}

criterion_group!(benches, traces, operators);
criterion_main!(benches);
