use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sepsos::choi::positivity_sample;
use sepsos::fixtures;
use sepsos::par::{map_range, Exec};
use sepsos::repro::{decomposable_round_trip, random_decomposable};
use sepsos::sos::SosOptions;
use sepsos::states::{ppt_check, random_separable};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn positivity(c: &mut Criterion) {
    let phi = fixtures::hakye_map();
    let mut g = c.benchmark_group("positivity_sample");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| positivity_sample(black_box(&phi), 4096, 1, exec))
        });
    }
    g.finish();
}

fn ppt_batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("ppt_batch");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                map_range(exec, 256, |i| {
                    let s = random_separable((3, 3), 4, i as u64).expect("dims");
                    ppt_check(&s.state, 1e-10).pass
                })
            })
        });
    }
    g.finish();
}

fn round_trip(c: &mut Criterion) {
    let mut g = c.benchmark_group("decomposable_round_trip");
    g.sample_size(10);
    let phi = random_decomposable(2, 2, 2024, 0).expect("shapes");
    for (name, exec) in MODES {
        let opts = SosOptions {
            exec,
            ..SosOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| decomposable_round_trip(black_box(&phi), opts))
        });
    }
    g.finish();
}

criterion_group!(benches, positivity, ppt_batch, round_trip);
criterion_main!(benches);
