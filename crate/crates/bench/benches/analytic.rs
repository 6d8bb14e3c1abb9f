use criterion::{criterion_group, criterion_main, Criterion};
use spl_core::dickman::{solve_theta1, solve_theta2, RhoTable, DEFAULT_STEP};
use spl_core::wsum::{holder_verify, w_sum, w_sum_sweep};

fn dickman(c: &mut Criterion) {
    c.bench_function("rho_table_u8", |b| b.iter(|| RhoTable::build(8.0, DEFAULT_STEP).unwrap()));
    let table = spl_bench::rho_table();
    c.bench_function("theta2", |b| b.iter(|| solve_theta2(&table).unwrap()));
    c.bench_function("theta1", |b| b.iter(|| solve_theta1(&table).unwrap()));
}

fn weighted(c: &mut Criterion) {
    let mut group = c.benchmark_group("w_sum");
    group.sample_size(10);
    group.bench_function("g2_l2_z1024", |b| b.iter(|| w_sum(2, 2, 1024).unwrap()));
    group.bench_function("g3_l3_z200", |b| b.iter(|| w_sum(3, 3, 200).unwrap()));
    group.bench_function("sweep_g2_z4096", |b| b.iter(|| w_sum_sweep(2, 2, 4096).unwrap()));
    group.bench_function("holder_g3_z100", |b| b.iter(|| holder_verify(3, 2, 100).unwrap()));
    group.finish();
}

criterion_group!(benches, dickman, weighted);
criterion_main!(benches);
