//! Default rayon pool against a single-thread pool on the data-parallel
//! kernels: composition, conditional values, classical enumeration and the
//! noise sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paraself::bell::{classical_bound, j_value, BellExpression, SchemeKind};
use paraself::certify::sweep_noise;
use paraself::strategies::{chsh_reference, compose};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
        (
            "sequential",
            rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap(),
        ),
    ]
}

fn bench_compose(c: &mut Criterion) {
    let s = chsh_reference();
    let mut group = c.benchmark_group("compose_broadcast");
    for (name, pool) in pools() {
        for n in [3usize, 5] {
            let copies = vec![s.clone(); n];
            group.bench_with_input(BenchmarkId::new(name, n), &copies, |b, copies| {
                b.iter(|| pool.install(|| compose(copies, SchemeKind::Broadcast).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_j_value(c: &mut Criterion) {
    let s = chsh_reference();
    let table = compose(&vec![s; 5], SchemeKind::Broadcast).unwrap();
    let expr = BellExpression::chsh();
    let mut group = c.benchmark_group("j_value_last_copy");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| j_value(&table, &expr, 5).unwrap()))
        });
    }
    group.finish();
}

fn bench_classical(c: &mut Criterion) {
    let expr = BellExpression::from_fn(4, 3, "pseudo-random", |x, y, a, b| {
        ((x * 7 + y * 5 + a * 3 + b) % 11) as f64 - 5.0
    })
    .unwrap();
    let mut group = c.benchmark_group("classical_bound_m4_o3");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| classical_bound(&expr).unwrap()))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let s = chsh_reference();
    let expr = BellExpression::chsh();
    let nus: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut group = c.benchmark_group("sweep_3_copies");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| sweep_noise(&s, 3, &expr, &nus).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_compose,
    bench_j_value,
    bench_classical,
    bench_sweep
);
criterion_main!(benches);
