use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minvar::schwarz::{lambda1_cap, CapSpec};
use minvar::spectral::gram_index;
use minvar::transforms::{beurling_t, cauchy_p, destabilizing_check, CutoffOptions};
use minvar::weierstrass::enneper_family;
use minvar::{Complex, LaurentTail, PlaneGrid};

fn gram(c: &mut Criterion) {
    let w = enneper_family(1, 1.2).unwrap();
    let mut g = c.benchmark_group("gram_index");
    for m in [4, 8, 16] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| b.iter(|| gram_index(&w, black_box(m), 1e-9)));
    }
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("plane_transforms");
    g.sample_size(20);
    for n in [128, 256] {
        let grid = PlaneGrid::new(8.0, n).unwrap();
        let mu = grid.sample_disk(|z| (Complex::new(1.0, 0.5) + z) * (-z.norm_sqr() / 0.04).exp());
        g.bench_with_input(BenchmarkId::new("cauchy_p", n), &mu, |b, mu| b.iter(|| cauchy_p(black_box(mu)).unwrap()));
        g.bench_with_input(BenchmarkId::new("beurling_t", n), &mu, |b, mu| b.iter(|| beurling_t(black_box(mu)).unwrap()));
    }
    g.finish();
}

fn cap(c: &mut Criterion) {
    c.bench_function("lambda1_cap", |b| b.iter(|| lambda1_cap(CapSpec::new(black_box(1.2)).unwrap(), 1e-9).unwrap()));
}

fn cutoff(c: &mut Criterion) {
    let w = enneper_family(1, 1.2).unwrap();
    let phi = LaurentTail::monomial(Complex::new(1.0, 0.0), 1);
    let mut g = c.benchmark_group("destabilizing_check");
    g.sample_size(10);
    g.bench_function("enneper_r1.2", |b| b.iter(|| destabilizing_check(&w, &phi, CutoffOptions::default()).unwrap()));
    g.finish();
}

criterion_group!(benches, gram, transforms, cap, cutoff);
criterion_main!(benches);
