//! Compares the rayon-backed data-parallel code paths against the forced
//! sequential fallback on a representative workload.

use criterion::{criterion_group, criterion_main, Criterion};
use symcartan::par;

fn bench_map(c: &mut Criterion) {
    let work = |k: usize| -> u64 {
        // small but non-trivial per-item cost
        let mut acc = 0u64;
        for i in 0..(k % 64 + 32) {
            acc = acc.wrapping_mul(6364136223846793005).wrapping_add(i as u64);
        }
        acc
    };
    let mut group = c.benchmark_group("map_range");
    group.bench_function("parallel", |b| {
        par::set_sequential(false);
        b.iter(|| par::map_range(4096, work))
    });
    group.bench_function("sequential", |b| {
        par::set_sequential(true);
        b.iter(|| par::map_range(4096, work))
    });
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench_map);
criterion_main!(benches);
