use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stancu_nno::analysis::{convergence_series, SeriesOptions, SlopeWindow, SpecTemplate};
use stancu_nno::{ActivationKernel, DomainBox, FunctionSource, Grid, OperatorSpec, StancuParams};

fn paper_f(s: f64) -> f64 {
    (s - 0.5).abs() + (6.0 * PI * s).sin()
}

fn template_1d() -> SpecTemplate {
    SpecTemplate {
        domain: DomainBox::interval(0.0, 1.0).unwrap(),
        kernel: ActivationKernel::logistic(1).unwrap(),
        params: StancuParams::new(0.5, 0.5).unwrap(),
        source: FunctionSource::analytic_1d(paper_f),
    }
}

fn grid_1d(c: &mut Criterion) {
    let grid = Grid::uniform_1d(0.0, 1.0, 20_001);
    let mut group = c.benchmark_group("evaluate_grid_1d");
    for n in [100u32, 1000] {
        let spec = template_1d().at(n).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", n), &spec, |b, s| {
            b.iter(|| s.evaluate_grid(&grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &spec, |b, s| {
            b.iter(|| s.evaluate_grid_sequential(&grid).unwrap())
        });
    }
    group.finish();
}

fn grid_2d(c: &mut Criterion) {
    let spec = OperatorSpec::new(
        DomainBox::unit(2).unwrap(),
        ActivationKernel::logistic(2).unwrap(),
        100,
        StancuParams::new(0.5, 0.5).unwrap(),
        FunctionSource::analytic(|s: &[f64]| paper_f(s[0]) * s[1].cos()),
    )
    .unwrap();
    let grid = Grid::tensor(&[0.0, 0.0], &[1.0, 1.0], 101).unwrap();
    let mut group = c.benchmark_group("evaluate_grid_2d");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| spec.evaluate_grid(&grid).unwrap()));
    group.bench_function("sequential", |b| b.iter(|| spec.evaluate_grid_sequential(&grid).unwrap()));
    group.finish();
}

fn series(c: &mut Criterion) {
    let n_list: Vec<u32> = (1..=100).map(|i| 10 * i).collect();
    let grid = Grid::uniform_1d(0.0, 1.0, 2001);
    let truth = |s: &[f64]| paper_f(s[0]);
    let mut group = c.benchmark_group("convergence_series");
    group.sample_size(10);
    group.bench_function("n=10..1000", |b| {
        b.iter(|| {
            convergence_series(
                &template_1d(),
                &truth,
                &n_list,
                &grid,
                SeriesOptions { window: SlopeWindow::UpperHalf, bound_pairs: Some(4096) },
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, grid_1d, grid_2d, series);
criterion_main!(benches);
