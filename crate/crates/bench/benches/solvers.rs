use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rabi_bench::{anisotropic_regime, split_regime, typical_two_state};
use rabi_core::exactdiag::{parity_gap_precise, solve_lowest, solve_parity_sector};
use rabi_core::variational::energy_2css;
use rabi_core::{solve_ansatz, AnsatzKind, Family, Parity, Truncation};

fn exact(c: &mut Criterion) {
    let p = split_regime();
    let mut group = c.benchmark_group("exact");
    for n in [128usize, 256] {
        let t = Truncation::new(n);
        group.bench_with_input(BenchmarkId::new("sector", n), &t, |b, t| {
            b.iter(|| solve_parity_sector(black_box(&p), t, Parity::Even, 1).unwrap())
        });
    }
    group.sample_size(10);
    group.bench_function("full_256", |b| b.iter(|| solve_lowest(black_box(&p), &Truncation::new(256), 1).unwrap()));
    let q = anisotropic_regime();
    group.bench_function("precise_gap_256", |b| {
        b.iter(|| parity_gap_precise(black_box(&q), &Truncation::new(256)).unwrap())
    });
    group.finish();
}

fn variational(c: &mut Criterion) {
    let p = split_regime();
    let a = typical_two_state();
    c.bench_function("energy_2css", |b| b.iter(|| energy_2css(black_box(&p), black_box(&a), Parity::Even).unwrap()));
    let mut group = c.benchmark_group("solve_ansatz");
    for family in Family::ALL {
        group.bench_function(family.name(), |b| b.iter(|| solve_ansatz(black_box(&p), AnsatzKind::even(family))));
    }
    group.finish();
}

criterion_group!(benches, exact, variational);
criterion_main!(benches);
