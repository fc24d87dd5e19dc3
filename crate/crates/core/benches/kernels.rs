//! Operator and solver throughput on the global rayon pool versus a
//! single-thread pool. Build with `--no-default-features` to time the
//! sequential fallback instead; both groups then run the same code.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use tiktv::admm::{run, AdmmConfig};
use tiktv::operators::{make_derivative_operator, make_radon, DerivativeKind, Identity, LinearOperator};
use tiktv::problems::{add_noise, make_phantom, NoiseReference, PhantomKind, TestProblem};
use tiktv::GridDims;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let n = rayon::current_num_threads();
    let mut out = vec![("threads=1".to_string(), ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if n > 1 {
        out.push((format!("threads={n}"), ThreadPoolBuilder::new().num_threads(n).build().unwrap()));
    }
    out
}

fn operators(c: &mut Criterion) {
    let dims = GridDims::new(256, 256).unwrap();
    let x = make_phantom(PhantomKind::SheppLogan, dims).unwrap();
    let angles: Vec<f64> = (0..90).map(|k| -90.0 + 2.0 * k as f64).collect();
    let radon = make_radon(dims, 363, &angles).unwrap();
    let d1 = make_derivative_operator(DerivativeKind::D1, dims).unwrap();
    let y = radon.forward(&x);

    let mut group = c.benchmark_group("operators");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("radon_forward", &name), |b| {
            b.iter(|| pool.install(|| black_box(radon.forward(&x))))
        });
        group.bench_function(BenchmarkId::new("radon_adjoint", &name), |b| {
            b.iter(|| pool.install(|| black_box(radon.adjoint(&y))))
        });
        group.bench_function(BenchmarkId::new("gradient_2d", &name), |b| {
            b.iter(|| pool.install(|| black_box(d1.forward(&x))))
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let dims = GridDims::new(128, 128).unwrap();
    let m = make_phantom(PhantomKind::PiecewiseSmooth2d, dims).unwrap();
    let clean = TestProblem::noiseless(Arc::new(Identity(dims.n())), m, dims, 0, "bench").unwrap();
    let p = add_noise(&clean, 0.3, NoiseReference::ModelNorm, 1).unwrap();
    let cfg = AdmmConfig { epsilon: p.epsilon, max_iter: 20, rel_change_tol: 0.0, ..AdmmConfig::default() };

    let mut group = c.benchmark_group("admm");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("denoise_128_20_iters", &name), |b| {
            b.iter(|| pool.install(|| black_box(run(p.as_problem(), &cfg, |_| {}).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, operators, solver);
criterion_main!(benches);
