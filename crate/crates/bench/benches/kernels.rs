use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hk_core::hermite::fill_hermite_functions;
use hk_core::quadrature::{gauss_hermite, singular_ball_rule};
use hk_core::spectral::{level_gram, projection_kernel, time_avg_weighted, KernelQuery, MultiIndex, SpectralState};

fn hermite(c: &mut Criterion) {
    let mut out = vec![0.0; 201];
    c.bench_function("hermite functions to degree 200", |b| {
        b.iter(|| fill_hermite_functions(black_box(3.7), &mut out))
    });
}

fn rules(c: &mut Criterion) {
    let mut group = c.benchmark_group("rules");
    for m in [20usize, 80, 200] {
        group.bench_with_input(BenchmarkId::new("gauss_hermite", m), &m, |b, &m| {
            b.iter(|| gauss_hermite(black_box(m)).unwrap())
        });
    }
    group.bench_function("singular_ball_rule d=3 degree 20", |b| {
        b.iter(|| singular_ball_rule(3, black_box(1.0), 20, 0, 1).unwrap())
    });
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let query = KernelQuery::new(3, 20, vec![0.4, -1.1, 2.0], vec![0.4, -1.1, 2.0]).unwrap();
    c.bench_function("projection_kernel n=3 k=20", |b| {
        b.iter(|| projection_kernel(black_box(&query)).unwrap())
    });
}

fn functionals(c: &mut Criterion) {
    let mut group = c.benchmark_group("functionals");
    group.sample_size(20);
    for k in [4usize, 10] {
        group.bench_with_input(BenchmarkId::new("level_gram n=3 delta=1", k), &k, |b, &k| {
            b.iter(|| level_gram(3, k, 1.0, &[0, 1, 2], 1).unwrap())
        });
    }
    let state = SpectralState::from_modes(
        3,
        [
            (MultiIndex::new([1, 0, 2]), hk_core::Complex64::new(1.0, 0.5)),
            (MultiIndex::new([0, 3, 0]), hk_core::Complex64::new(-0.3, 0.0)),
            (MultiIndex::new([4, 2, 2]), hk_core::Complex64::new(0.0, 2.0)),
        ],
    )
    .unwrap();
    group.bench_function("time_avg_weighted n=3 delta=1", |b| {
        b.iter(|| time_avg_weighted(black_box(&state), 1.0, &[0, 1, 2], 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, hermite, rules, kernels, functionals);
criterion_main!(benches);
