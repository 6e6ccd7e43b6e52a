use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wva_core::estimation::variance_study;
use wva_core::protocols::{run_pctc_wva, run_standard_wva, ProtocolConfig};
use wva_core::statevec::{apply_unitary, OperatorKind, OperatorMatrix, StateVector};

fn sigma_z() -> OperatorMatrix {
    OperatorMatrix::pauli_z(OperatorKind::Hermitian)
}

fn bench_apply_unitary(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_unitary");
    let h = OperatorMatrix::hadamard();
    let hh = h.kron(&h, OperatorKind::Unitary).unwrap();
    for n in [2usize, 3, 5] {
        let state = StateVector::basis(n, 0).unwrap();
        group.bench_with_input(BenchmarkId::new("one_qubit", n), &state, |b, s| {
            b.iter(|| apply_unitary(black_box(s), &h, &[n - 1]).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("two_qubit", n), &state, |b, s| {
            b.iter(|| apply_unitary(black_box(s), &hh, &[0, n - 1]).unwrap())
        });
    }
    group.finish();
}

fn bench_protocols(c: &mut Criterion) {
    let cfg = ProtocolConfig::gamma_family(0.75 * PI - 0.3, 1e-3, sigma_z()).unwrap();
    c.bench_function("run_standard_wva", |b| b.iter(|| run_standard_wva(black_box(&cfg)).unwrap()));
    c.bench_function("run_pctc_wva", |b| b.iter(|| run_pctc_wva(black_box(&cfg)).unwrap()));
}

fn bench_variance_study(c: &mut Criterion) {
    let cfg = ProtocolConfig::gamma_family(0.75 * PI - 0.3, 0.05, sigma_z()).unwrap();
    let outcome = run_standard_wva(&cfg).unwrap();
    let mut group = c.benchmark_group("variance_study");
    group.sample_size(10);
    group.bench_function("20x10000", |b| {
        b.iter(|| variance_study(black_box(&outcome), 0.05, 20, 10_000, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_apply_unitary, bench_protocols, bench_variance_study);
criterion_main!(benches);
