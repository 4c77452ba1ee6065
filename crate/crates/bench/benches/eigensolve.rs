use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wignerlab::eigensolve::{count_in_interval, tridiagonalize};
use wignerlab::spectral::stieltjes_empirical;
use wignerlab::{builtin_ensemble, eigen_full, eigenvalues, sample_matrix, Builtin, Complex64, Interval};

fn gue(n: usize) -> wignerlab::HermitianMatrix {
    sample_matrix(&builtin_ensemble(Builtin::Gue), n, 1).wigner_view()
}

fn bench_sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_matrix");
    for n in [100, 400] {
        g.bench_with_input(BenchmarkId::new("gue", n), &n, |b, &n| {
            b.iter(|| sample_matrix(&builtin_ensemble(Builtin::Gue), black_box(n), 1))
        });
    }
    g.finish();
}

fn bench_tridiagonalize(c: &mut Criterion) {
    let mut g = c.benchmark_group("tridiagonalize");
    g.sample_size(10);
    for n in [100, 400] {
        let h = gue(n);
        g.bench_with_input(BenchmarkId::new("values", n), &h, |b, h| b.iter(|| tridiagonalize(black_box(h), false)));
        g.bench_with_input(BenchmarkId::new("with_transform", n), &h, |b, h| {
            b.iter(|| tridiagonalize(black_box(h), true))
        });
    }
    g.finish();
}

fn bench_eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigensolve");
    g.sample_size(10);
    for n in [100, 300] {
        let h = gue(n);
        g.bench_with_input(BenchmarkId::new("eigenvalues", n), &h, |b, h| b.iter(|| eigenvalues(black_box(h))));
        g.bench_with_input(BenchmarkId::new("eigen_full", n), &h, |b, h| b.iter(|| eigen_full(black_box(h))));
    }
    g.finish();
}

fn bench_sturm(c: &mut Criterion) {
    let t = tridiagonalize(&gue(1000), false);
    let i = Interval::new(-1.0, 1.0).unwrap();
    c.bench_function("sturm_count_n1000", |b| b.iter(|| count_in_interval(black_box(&t), i)));
    let eigs = eigenvalues(&gue(1000)).unwrap();
    c.bench_function("stieltjes_empirical_n1000", |b| {
        b.iter(|| stieltjes_empirical(black_box(&eigs), Complex64::new(0.3, 0.1)))
    });
}

criterion_group!(benches, bench_sampling, bench_tridiagonalize, bench_eigen, bench_sturm);
criterion_main!(benches);
