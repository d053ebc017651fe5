use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use episode_rules::{build_qe_index, mine, mine_frequent_meo, Strategies};
use episode_rules_bench::{corpus, params, QUERY};

fn by_mask(c: &mut Criterion) {
    let n = 20_000;
    let seq = corpus(n);
    let mut group = c.benchmark_group("mine_by_mask");
    group.sample_size(10);
    for strategies in Strategies::all_masks() {
        let p = params(n, strategies);
        group.bench_with_input(
            BenchmarkId::from_parameter(strategies.count()),
            &p,
            |b, p| b.iter(|| mine(black_box(&seq), p).expect("mine")),
        );
    }
    group.finish();
}

fn by_length(c: &mut Criterion) {
    let mut group = c.benchmark_group("mine_by_length");
    group.sample_size(10);
    for n in [10_000, 40_000, 100_000] {
        let seq = corpus(n);
        let p = params(n, Strategies::ALL);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| mine(black_box(&seq), p).expect("mine"))
        });
    }
    group.finish();
}

fn stages(c: &mut Criterion) {
    let n = 20_000;
    let seq = corpus(n);
    let p = params(n, Strategies::ALL);
    c.bench_function("frequent_antecedents", |b| {
        b.iter(|| mine_frequent_meo(black_box(&seq), p.min_sup, p.delta))
    });
    c.bench_function("query_index", |b| {
        b.iter(|| {
            build_qe_index(
                black_box(&seq),
                &episode_rules::Episode::of(&QUERY),
                p.epsilon,
            )
        })
    });
}

criterion_group!(benches, by_mask, by_length, stages);
criterion_main!(benches);
