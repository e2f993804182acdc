use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dhstab::conicqp::{project_triplet, psd_project};
use dhstab::linalg::{general_eig, herm_eig, hermitian_part, skew_part};
use dhstab::nearstab::gradient;
use dhstab::{Catalog, ConicConfig, DMatrix, DhTriplet, Region};

/// Deterministic dense test matrix with entries in [-1, 1].
fn filled(n: usize, salt: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) as f64 * 0.37 + salt).sin())
}

fn triplet(n: usize) -> DhTriplet<f64> {
    let g = filled(n, 0.5);
    let p = &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
    DhTriplet::new(skew_part(&filled(n, 1.0)), hermitian_part(&filled(n, 2.0)), p).unwrap()
}

fn eigensolvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig");
    for n in [10, 20, 40] {
        let h = hermitian_part(&filled(n, 0.0));
        group.bench_with_input(BenchmarkId::new("herm_eig", n), &h, |b, h| b.iter(|| herm_eig(black_box(h)).unwrap()));
        let a = filled(n, 3.0);
        group.bench_with_input(BenchmarkId::new("general_eig", n), &a, |b, a| {
            b.iter(|| general_eig(black_box(a)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("psd_project", n), &h, |b, h| {
            b.iter(|| psd_project(black_box(h), 1e-3).unwrap())
        });
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let mut group = c.benchmark_group("project_triplet");
    group.sample_size(10);
    let cfg = ConicConfig::default();
    let regions = [
        ("disk", Region::catalog(Catalog::Disk { q: -0.5, r: 2.0 }).unwrap()),
        ("left_conic", Region::catalog(Catalog::LeftConic { a: 1.0, theta: 1.0 }).unwrap()),
    ];
    for (name, region) in &regions {
        for n in [4, 10] {
            let t = triplet(n);
            group.bench_with_input(BenchmarkId::new(*name, n), &t, |b, t| {
                b.iter(|| project_triplet(region, black_box(t), 1e-3, 1e-3, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn objective_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient");
    for n in [10, 40] {
        let (a, t) = (filled(n, 4.0), triplet(n));
        group.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| gradient(black_box(&a), black_box(&t)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, eigensolvers, projection, objective_gradient);
criterion_main!(benches);
