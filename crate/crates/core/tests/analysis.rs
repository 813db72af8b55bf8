mod common;

use stancu_nno::analysis::{
    check_bound_dominance, convergence_series, estimate_modulus, max_error, SeriesOptions,
    SlopeWindow, SpecTemplate,
};
use stancu_nno::{ActivationKernel, DomainBox, FunctionSource, Grid, OperatorSpec, StancuParams};

fn unit() -> DomainBox {
    DomainBox::interval(0.0, 1.0).unwrap()
}

fn template(alpha: f64, beta: f64, f: fn(f64) -> f64) -> SpecTemplate {
    SpecTemplate {
        domain: unit(),
        kernel: ActivationKernel::logistic(1).unwrap(),
        params: StancuParams::new(alpha, beta).unwrap(),
        source: FunctionSource::analytic_1d(f),
    }
}

fn truth(f: fn(f64) -> f64) -> impl Fn(&[f64]) -> f64 {
    move |s: &[f64]| f(s[0])
}

#[test]
fn max_error_matches_naive_oracle() {
    let spec = template(0.5, 0.5, common::paper_f).at(50).unwrap();
    let grid = Grid::uniform_1d(0.0, 1.0, 2001);
    let report = max_error(&spec, &truth(common::paper_f), &grid).unwrap();
    let oracle = grid
        .coords()
        .iter()
        .map(|&s| (common::operator_1d(common::paper_f, 0.0, 1.0, 50, 0.5, 0.5, s) - common::paper_f(s)).abs())
        .fold(0.0, f64::max);
    assert!((report.max_error - oracle).abs() < 1e-12);
    assert_eq!(report.n, 50);
}

#[test]
fn self_comparison_has_zero_error() {
    let spec = template(0.5, 0.5, common::paper_f).at(50).unwrap();
    let grid = Grid::uniform_1d(0.0, 1.0, 101);
    let values = spec.evaluate_grid(&grid).unwrap();
    let lookup = move |s: &[f64]| values[(s[0] * 100.0).round() as usize];
    assert_eq!(max_error(&spec, &lookup, &grid).unwrap().max_error, 0.0);
}

#[test]
fn modulus_agrees_with_dense_brute_force() {
    let f = |s: &[f64]| common::paper_f(s[0]);
    let est = estimate_modulus(&f, &unit(), 0.01, 4096).unwrap();
    let brute = common::modulus_pairs(common::paper_f, 0.01, 100_000);
    assert!(est.omega >= brute * (1.0 - 1e-3), "{} vs {brute}", est.omega);
    // The true supremum is at most 6 pi delta + delta.
    assert!(est.omega <= 0.01 * (6.0 * std::f64::consts::PI + 1.0) + 1e-12);
}

#[test]
fn modulus_is_subadditive_and_monotone() {
    let f = |s: &[f64]| common::paper_f(s[0]);
    let mut prev = 0.0;
    for i in 1..=40 {
        let d = 0.005 * f64::from(i);
        let w = estimate_modulus(&f, &unit(), d, 4096).unwrap().omega;
        let w2 = estimate_modulus(&f, &unit(), 2.0 * d, 4096).unwrap().omega;
        assert!(w2 <= 2.0 * w * 1.05, "delta={d}");
        assert!(w >= prev * (1.0 - 1e-5), "delta={d}: {w} < {prev}");
        prev = w;
    }
}

#[test]
fn modulus_in_two_dimensions() {
    let f = |s: &[f64]| s[0] + 2.0 * s[1];
    let est = estimate_modulus(&f, &DomainBox::unit(2).unwrap(), 0.05, 4096).unwrap();
    assert!((est.omega - 0.15).abs() < 1e-9, "{}", est.omega);
}

#[test]
fn bound_dominates_measured_error() {
    let grid = Grid::uniform_1d(0.0, 1.0, 2001);
    let fs: [fn(f64) -> f64; 2] = [|s| s, common::paper_f];
    for f in fs {
        for n in [50u32, 100, 500] {
            let spec = template(0.5, 0.5, f).at(n).unwrap();
            let check = check_bound_dominance(&spec, &truth(f), &grid, 4096).unwrap();
            assert!(check.holds, "n={n}: {} > {}", check.measured, check.bound);
        }
    }
}

#[test]
fn lipschitz_function_converges_at_first_order() {
    let n_list: Vec<u32> = (1..=10).map(|i| 100 * i).collect();
    let series = convergence_series(
        &template(0.5, 0.5, |s| s),
        &truth(|s| s),
        &n_list,
        &Grid::uniform_1d(0.0, 1.0, 2001),
        SeriesOptions { window: SlopeWindow::All, bound_pairs: None },
    )
    .unwrap();
    let slope = series.fitted_slope.unwrap();
    assert!((-1.2..=-0.8).contains(&slope), "{slope}");
}

#[test]
fn paper_function_error_decays() {
    let n_list: Vec<u32> = (1..=100).map(|i| 10 * i).collect();
    let series = convergence_series(
        &template(0.5, 0.5, common::paper_f),
        &truth(common::paper_f),
        &n_list,
        &Grid::uniform_1d(0.0, 1.0, 2001),
        SeriesOptions { window: SlopeWindow::Range { min_n: 100, max_n: 1000 }, bound_pairs: Some(4096) },
    )
    .unwrap();
    let (e10, e1000) = (series.error_at(10).unwrap(), series.error_at(1000).unwrap());
    assert!(e1000 < e10 / 20.0);
    let slope = series.fitted_slope.unwrap();
    assert!((-1.3..=-0.6).contains(&slope), "{slope}");
    assert!(series.entries.iter().all(|e| e.report.max_error <= e.bound.unwrap()));
}

#[test]
fn exact_reproduction_is_flagged_degenerate() {
    let series = convergence_series(
        &template(0.0, 0.0, |_| 2.0),
        &truth(|_| 2.0),
        &[10, 20, 40],
        &Grid::uniform_1d(0.0, 1.0, 101),
        SeriesOptions::default(),
    )
    .unwrap();
    assert!(series.degenerate && series.fitted_slope.is_none());
}

#[test]
fn invalid_resolution_is_reported_with_n() {
    let t = SpecTemplate {
        domain: DomainBox::interval(0.1, 0.2).unwrap(),
        ..template(0.0, 0.0, |s| s)
    };
    let err = convergence_series(&t, &truth(|s| s), &[3, 20], &Grid::uniform_1d(0.1, 0.2, 11), SeriesOptions::default())
        .unwrap_err();
    assert!(err.to_string().contains("n=3"), "{err}");
}

#[test]
fn spec_rate_constant_for_unit_interval() {
    let spec = OperatorSpec::new(
        unit(),
        ActivationKernel::logistic(1).unwrap(),
        10,
        StancuParams::new(1.0, 2.0).unwrap(),
        FunctionSource::constant(0.0),
    )
    .unwrap();
    let inv = 1.0 / common::sigma(1.0);
    assert!((spec.rate_constant() - inv * (2.0 + 3.0)).abs() < 1e-9);
}
