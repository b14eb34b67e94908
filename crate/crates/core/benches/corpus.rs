use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sessc::correspond::{term_suite_with, type_suite_with, GenConfig};
use sessc::par;

fn suites(c: &mut Criterion) {
    let cfg = GenConfig::default();
    let mut g = c.benchmark_group("type-suite");
    g.sample_size(10);
    for n in [50, 200] {
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| b.iter(|| type_suite_with(&cfg, n, |s, f| par::map(s, f))));
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| type_suite_with(&cfg, n, |s, f| par::map_sequential(s, f)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("term-suite");
    g.sample_size(10);
    for n in [50, 200] {
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| b.iter(|| term_suite_with(&cfg, n, 3, |s, f| par::map(s, f))));
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| term_suite_with(&cfg, n, 3, |s, f| par::map_sequential(s, f)))
        });
    }
    g.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
