use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dissctl::numerics::matrix_exponential;
use dissctl::optimize::{Evaluator, GradientMethod};
use dissctl::propagation::propagate;
use dissctl_bench::{problem, random_matrix, Fixture};
use std::hint::black_box;

fn expm(c: &mut Criterion) {
    let mut g = c.benchmark_group("expm");
    for n in [16, 64, 81, 256] {
        let a = random_matrix(n, 1.0, n as u64);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| matrix_exponential(black_box(a)).unwrap()));
    }
    g.finish();
}

fn gradient(c: &mut Criterion) {
    let mut g = c.benchmark_group("gradient");
    g.sample_size(10);
    for f in [Fixture::Ising3, Fixture::Gmon2, Fixture::IonTrap4] {
        let (p, x) = problem(f, 20);
        let ev = Evaluator::new(&p).unwrap();
        g.bench_function(BenchmarkId::new("series", f.label()), |b| {
            b.iter(|| ev.error_and_gradient(black_box(&x), GradientMethod::Auxiliary).unwrap())
        });
    }
    let (p, x) = problem(Fixture::Ising3, 20);
    let ev = Evaluator::new(&p).unwrap();
    g.bench_function(BenchmarkId::new("dense", "ising3"), |b| {
        b.iter(|| ev.error_and_gradient(black_box(&x), GradientMethod::AuxiliaryDense).unwrap())
    });
    g.finish();
}

fn propagation(c: &mut Criterion) {
    let mut g = c.benchmark_group("propagate");
    g.sample_size(10);
    for f in [Fixture::Ising3, Fixture::Gmon2, Fixture::IonTrap4] {
        let (p, x) = problem(f, 40);
        let seq = Evaluator::new(&p).unwrap().to_sequence(&x);
        g.bench_function(f.label(), |b| b.iter(|| propagate(&p.system, black_box(&seq), &p.initial).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, expm, gradient, propagation);
criterion_main!(benches);
