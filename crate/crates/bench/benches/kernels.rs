use std::hint::black_box;

use approxinv::approx_inverse::certificate;
use approxinv::dynamics::{build_chain, spectral_gap};
use approxinv::gibbs::{enumerate, DEFAULT_CONFIG_CAP};
use approxinv::graph::generators::{complete_ary_tree, cycle};
use approxinv::influence::tree_influence_fast;
use approxinv::linalg::eigenvalues_sym;
use approxinv::{Matrix, ModelInstance};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues_sym");
    for n in [16, 64, 160] {
        let a = Matrix::from_fn(n, n, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { n as f64 } else { 0.0 });
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| eigenvalues_sym(black_box(a)).unwrap()));
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for n in [10, 16, 22] {
        let m = ModelInstance::monomer_dimer(cycle(n).unwrap(), 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("md-cycle", n), &m, |b, m| b.iter(|| enumerate(black_box(m), DEFAULT_CONFIG_CAP).unwrap()));
    }
    group.finish();
}

fn tree_influence(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_influence_fast");
    for h in [3, 5] {
        let m = ModelInstance::hardcore(complete_ary_tree(3, h), 2.0).unwrap();
        group.bench_with_input(BenchmarkId::new("hc-3ary", h), &m, |b, m| b.iter(|| tree_influence_fast(black_box(m)).unwrap()));
    }
    group.finish();
}

fn certify(c: &mut Criterion) {
    let m = ModelInstance::monomer_dimer(cycle(12).unwrap(), 2.0).unwrap();
    c.bench_function("certificate/md-cycle-12", |b| b.iter(|| certificate(black_box(&m)).unwrap()));
    let t = ModelInstance::hardcore(complete_ary_tree(2, 5), 1.0).unwrap();
    c.bench_function("certificate/hc-binary-h5", |b| b.iter(|| certificate(black_box(&t)).unwrap()));
}

fn chain_gap(c: &mut Criterion) {
    let m = ModelInstance::monomer_dimer(cycle(10).unwrap(), 1.0).unwrap();
    let chain = build_chain(&m, DEFAULT_CONFIG_CAP).unwrap();
    c.bench_function("spectral_gap/md-cycle-10", |b| b.iter(|| spectral_gap(black_box(&chain)).unwrap()));
}

criterion_group!(benches, eigensolver, enumeration, tree_influence, certify, chain_gap);
criterion_main!(benches);
