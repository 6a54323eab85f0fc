use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use pointspec::dynamics::{dephase, discretize, DephaseOptions, GridSpec, GridState, Propagator};
use pointspec::{build_two_point, find_bound_states, handed_states, OnePointExtension, PointInteraction, ScanOptions};

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_bound_states");
    let cases: [(&str, PointInteraction); 3] = [
        ("two_point", build_two_point(2.0, 1.0, 0.3).unwrap().into()),
        ("degenerate", build_two_point(1.0, 1.0, 0.5).unwrap().into()),
        ("delta_prime", OnePointExtension::delta_prime(1.0, 2.0).unwrap().into()),
    ];
    for (name, ext) in cases {
        group.bench_function(name, |b| {
            b.iter(|| find_bound_states(black_box(&ext), &ScanOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn stepping(c: &mut Criterion) {
    let ext: PointInteraction = build_two_point(1.0, 1.0, 0.5).unwrap().into();
    let (left, _) = handed_states(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("crank_nicolson");
    for n in [1024, 4096, 16384] {
        let grid = GridSpec::for_interaction(&ext, 12.0, n).unwrap();
        let ham = discretize(&ext, &grid).unwrap();
        group.bench_with_input(BenchmarkId::new("factorize", n), &n, |b, _| {
            b.iter(|| Propagator::new(black_box(&ham), 0.005).unwrap())
        });
        let prop = Propagator::new(&ham, 0.005).unwrap();
        let psi = GridState::sample(Arc::clone(ham.layout()), &left).unwrap();
        let mut amps: Vec<Complex64> = psi.amplitudes().to_vec();
        group.bench_with_input(BenchmarkId::new("step", n), &n, |b, _| {
            b.iter(|| prop.step(black_box(&mut amps)).unwrap())
        });
    }
    group.finish();
}

fn dephasing(c: &mut Criterion) {
    let ext: PointInteraction = build_two_point(1.0, 1.0, 0.5).unwrap().into();
    let grid = GridSpec::for_interaction(&ext, 12.0, 2048).unwrap();
    let ham = discretize(&ext, &grid).unwrap();
    let (left, _) = handed_states(1.0, 0.5).unwrap();
    let psi = GridState::sample(Arc::clone(ham.layout()), &left).unwrap().normalized().unwrap();
    c.bench_function("dephase_1000", |b| {
        b.iter(|| dephase(black_box(&psi), std::slice::from_ref(&psi), &DephaseOptions::uniform(1000, 0)).unwrap())
    });
}

criterion_group!(benches, spectra, stepping, dephasing);
criterion_main!(benches);
