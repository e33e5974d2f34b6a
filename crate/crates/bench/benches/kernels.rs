use std::hint::black_box;

use bfree::ring::hnf::hnf;
use bfree::{count_admissible, sieve_window, CountMethod, CountOptions, IdealLattice, Region, SVector};
use bfree_bench::{explicit, gaussian_integers, integers, squares};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use num_bigint::BigInt;

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    let z = squares(&integers(), 100_000_000);
    for radius in [100_000i64, 1_000_000] {
        let region = Region::centered(1, radius);
        g.throughput(Throughput::Elements(region.point_count() as u64));
        g.bench_with_input(BenchmarkId::new("Z squares", radius), &region, |b, r| {
            b.iter(|| sieve_window(&z, r, z.len()).unwrap())
        });
    }
    let gi = squares(&gaussian_integers(), 100_000_000);
    let region = Region::centered(2, 700);
    g.throughput(Throughput::Elements(region.point_count() as u64));
    g.bench_function("Z[i] squares, radius 700", |b| b.iter(|| sieve_window(&gi, &region, gi.len()).unwrap()));
    g.finish();
}

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("admissible count");
    let fam = explicit(&integers(), &[4, 9, 25]);
    let ie = CountOptions { method: Some(CountMethod::InclusionExclusion), ..Default::default() };
    let bf = CountOptions { method: Some(CountMethod::BruteForce), ..Default::default() };
    let small = Region::segment(0, 17).unwrap();
    g.bench_function("inclusion-exclusion, 18 points", |b| {
        b.iter(|| count_admissible(&small, &fam, 3, &SVector::ones(), ie).unwrap())
    });
    g.bench_function("brute force, 18 points", |b| {
        b.iter(|| count_admissible(&small, &fam, 3, &SVector::ones(), bf).unwrap())
    });
    // a third level makes the term count explode past a few dozen points
    let two = explicit(&integers(), &[4, 9]);
    for n in [360i64, 1080] {
        let region = Region::segment(0, n - 1).unwrap();
        g.bench_with_input(BenchmarkId::new("inclusion-exclusion, {4,9}", n), &region, |b, r| {
            b.iter(|| count_admissible(r, &two, 2, &SVector::ones(), ie).unwrap())
        });
    }
    g.finish();
}

fn hermite(c: &mut Criterion) {
    let mut g = c.benchmark_group("hnf");
    let cubic = bfree::make_order(&[-1, -1, 0, 1]).unwrap();
    let x = cubic.element(&[7, -3, 2]).unwrap();
    // x·θ^k for k < 3 generate the principal ideal (x)
    let gens: Vec<Vec<BigInt>> = (0..3)
        .map(|k| cubic.mul(&x, &cubic.basis_element(k)).unwrap().0.into_iter().map(BigInt::from).collect())
        .collect();
    g.bench_function("canonical 3x3", |b| b.iter(|| hnf(black_box(&gens), 3, false).unwrap()));
    let y = cubic.element(&[11, 5, -4]).unwrap();
    let a = IdealLattice::principal(&cubic, &x).unwrap();
    let bb = IdealLattice::principal(&cubic, &y).unwrap();
    g.bench_function("ideal product, degree 3", |b| b.iter(|| a.product(black_box(&bb)).unwrap()));
    g.finish();
}

criterion_group!(benches, sieve, counting, hermite);
criterion_main!(benches);
