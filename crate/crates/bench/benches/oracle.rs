use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nopo_core::oracle::{
    build_generator, steady_state, Layout, SectorOperator, SylvesterPreconditioner,
};
use nopo_core::{Complex64, NopoParams, OracleConfig};
use std::hint::black_box;

fn params() -> NopoParams {
    let base = NopoParams::new(0.5, 1.0, 18.0, 1.0, 0.0);
    base.with_p(0.5 * base.lambda().norm_sqr())
}

fn seed(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect()
}

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_operators");
    for cutoff in [20usize, 40] {
        let config = OracleConfig {
            cutoff,
            ..Default::default()
        };
        let generator = build_generator(&params(), &config).unwrap();
        let layout = Layout::mirrored(cutoff);
        let x = seed(layout.len);
        let op = SectorOperator::new(&generator, layout.clone());
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        g.bench_with_input(BenchmarkId::new("apply", cutoff), &cutoff, |b, _| {
            b.iter(|| op.apply(black_box(&x), &mut y))
        });
        let pre = SylvesterPreconditioner::new(&generator, &layout, config.shift).unwrap();
        g.bench_with_input(BenchmarkId::new("precondition", cutoff), &cutoff, |b, _| {
            b.iter(|| pre.apply(black_box(&x), &mut y))
        });
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_steady_state");
    g.sample_size(10);
    for cutoff in [20usize, 30] {
        let config = OracleConfig {
            cutoff,
            ..Default::default()
        };
        let generator = build_generator(&params(), &config).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(cutoff), &cutoff, |b, _| {
            b.iter(|| steady_state(&generator, &config).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, operators, solve);
criterion_main!(benches);
