use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hsc_core::pipeline::refine;
use hsc_core::{
    cluster_rows, hsc, hsclr, sample_weighted_sbm, similarity_matrix, top_k_eigenvectors, trim,
    EigenMode, HscConfig, HsclrConfig, SbmParams,
};

fn params(n: usize) -> SbmParams {
    let total = hsc_core::combinatorics::binomial(n, 3);
    let alpha = 4.0 * n as f64 * (n as f64).ln() / total;
    SbmParams::symmetric(n, 3, 2, 0.9, 0.1, alpha).unwrap()
}

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("stages");
    g.sample_size(10);
    for n in [100, 200, 400] {
        let (h, truth) = sample_weighted_sbm(&params(n), 1).unwrap();
        g.bench_with_input(BenchmarkId::new("similarity", n), &h, |b, h| {
            b.iter(|| similarity_matrix(h))
        });
        let a = similarity_matrix(&h);
        let (a0, _) = trim(&a, 27.0).unwrap();
        g.bench_with_input(BenchmarkId::new("eigen", n), &a0, |b, a0| {
            b.iter(|| top_k_eigenvectors(a0, 2, EigenMode::Assortative).unwrap())
        });
        let e = top_k_eigenvectors(&a0, 2, EigenMode::Assortative).unwrap();
        g.bench_with_input(BenchmarkId::new("kmeans", n), &e, |b, e| {
            b.iter(|| cluster_rows(&e.vectors, 2, 10, 1e-6, 3).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("refine", n), &h, |b, h| {
            b.iter(|| refine(h, &truth, 2).unwrap())
        });
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut g = c.benchmark_group("end_to_end");
    g.sample_size(10);
    for n in [100, 200] {
        let (h, _) = sample_weighted_sbm(&params(n), 1).unwrap();
        g.bench_with_input(BenchmarkId::new("hsc", n), &h, |b, h| {
            b.iter(|| hsc(h, &HscConfig::new(2), 5).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("hsclr", n), &h, |b, h| {
            b.iter(|| hsclr(h, &HsclrConfig::new(2), 5).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sample", n), &n, |b, &n| {
            let p = params(n);
            b.iter(|| sample_weighted_sbm(&p, 2).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, stages, end_to_end);
criterion_main!(benches);
