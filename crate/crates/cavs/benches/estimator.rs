//! Benchmarks comparing the data-parallel path against a single worker.
//! Built without the `parallel` feature, only the sequential path exists.

use criterion::{criterion_group, criterion_main, Criterion};

use cavs::dist::{sample, stream_rng, DistributionSpec};
use cavs::regress::{cavs_regress, DesignMatrix};
use cavs::{cavs_estimate, CavsConfig};
use rand::Rng;

fn bench_location(c: &mut Criterion) {
    let mut rng = stream_rng(99, "bench-location", 0);
    let s = sample(&DistributionSpec::uniform(), 4000, &mut rng).unwrap();
    let cfg = CavsConfig::with_tau(1.0);
    let mut group = c.benchmark_group("estimate_uniform_n4000");
    group.bench_function("default_pool", |b| b.iter(|| cavs_estimate(&s, &cfg).unwrap()));
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("one_thread", |b| {
            b.iter(|| pool.install(|| cavs_estimate(&s, &cfg).unwrap()))
        });
    }
    group.finish();
}

fn bench_regression(c: &mut Criterion) {
    let mut rng = stream_rng(99, "bench-regress", 0);
    let n = 400;
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row = vec![1.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let noise: f64 = rng.random_range(-1.0..1.0);
        y.push(row[1] * 2.0 - row[2] + noise);
        rows.push(row);
    }
    let dm = DesignMatrix::from_rows(&rows).unwrap();
    let cfg = CavsConfig::with_tau(1.0);
    let mut group = c.benchmark_group("regress_uniform_n400_d3");
    group.sample_size(20);
    group.bench_function("default_pool", |b| b.iter(|| cavs_regress(&dm, &y, &cfg).unwrap()));
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("one_thread", |b| {
            b.iter(|| pool.install(|| cavs_regress(&dm, &y, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_location, bench_regression);
criterion_main!(benches);
