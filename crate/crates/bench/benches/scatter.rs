use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ptscatter_core::{cascade, solve_amplitudes, sweep, trace_argand, DimerFamily, EnergyWindow};

fn bench_cascade(c: &mut Criterion) {
    let pot = DimerFamily::reference().at(0.013).unwrap();
    c.bench_function("cascade", |b| {
        b.iter(|| cascade(black_box(&pot), black_box(0.2174)))
    });
    c.bench_function("solve_amplitudes", |b| {
        b.iter(|| solve_amplitudes(black_box(&pot), black_box(0.2174)))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let family = DimerFamily::reference();
    let window = EnergyWindow::default();
    let mut group = c.benchmark_group("sweep");
    for n in [1001, 4001] {
        let pot = family.at(0.013).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sweep(&pot, &window, n))
        });
    }
    group.finish();

    let pot = family.at(0.029).unwrap();
    c.bench_function("trace_argand/4001", |b| {
        b.iter(|| trace_argand(&pot, &window, 4001))
    });
}

criterion_group!(benches, bench_cascade, bench_sweep);
criterion_main!(benches);
