use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spl_core::forms::count_simultaneous;
use spl_core::shifted::{t_k_theta_fast, t_k_theta_oracle, t_prime_theta, t_theta};
use spl_core::ShiftSystem;

fn single(c: &mut Criterion) {
    let tables = spl_bench::tables(1_000_000);
    let half = spl_bench::theta(1, 2);
    c.bench_function("t_theta_1e6", |b| b.iter(|| t_theta(&tables, 1_000_000, half).unwrap()));
    c.bench_function("t_prime_theta_1e6", |b| {
        b.iter(|| t_prime_theta(&tables, 1_000_000, half).unwrap())
    });
}

fn tuples(c: &mut Criterion) {
    let tables = spl_bench::tables(1_000_000);
    let mut group = c.benchmark_group("t_k_theta");
    group.sample_size(10);
    for x in [3_000u64, 30_000] {
        let theta = spl_bench::theta(1, 4);
        group.bench_with_input(BenchmarkId::new("fast", x), &x, |b, &x| {
            b.iter(|| t_k_theta_fast(&tables, x, 2, theta).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("oracle", x), &x, |b, &x| {
            b.iter(|| t_k_theta_oracle(&tables, x, 2, theta).unwrap())
        });
    }
    group.bench_function("fast/1e6", |b| {
        b.iter(|| t_k_theta_fast(&tables, 1_000_000, 2, spl_bench::theta(1, 4)).unwrap())
    });
    group.finish();
}

fn simultaneous(c: &mut Criterion) {
    let tables = spl_bench::tables(10_000_000);
    let system = ShiftSystem::from_shifts(&[2, 4]).unwrap();
    c.bench_function("count_simultaneous_2_4_1e6", |b| {
        b.iter(|| count_simultaneous(tables.sieve(), 1_000_000, &system).unwrap())
    });
}

criterion_group!(benches, single, tuples, simultaneous);
criterion_main!(benches);
