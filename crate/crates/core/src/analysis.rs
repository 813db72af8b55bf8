//! Error measurement, convergence series and modulus-of-continuity estimates.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{linspace, Grid};
use crate::kernel::ActivationKernel;
use crate::operator::{DomainBox, FunctionSource, OperatorSpec, StancuParams};
use crate::par;

/// Errors below this are treated as exact reproduction; no slope is fitted.
pub const DEGENERATE_ERROR: f64 = 1e-12;

/// Safety factor applied to modulus estimates on the bound side of a comparison.
/// The estimates are lower bounds of the true supremum.
pub const OMEGA_INFLATION: f64 = 1.25;

pub const DEFAULT_SAMPLE_PAIRS: usize = 4096;

/// Sup-norm error of one operator against the function it approximates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub n: u32,
    pub max_error: f64,
    pub argmax_point: Vec<f64>,
    pub mean_abs_error: f64,
}

pub fn max_error<T>(spec: &OperatorSpec, truth: &T, grid: &Grid) -> Result<ErrorReport>
where
    T: Fn(&[f64]) -> f64 + ?Sized,
{
    if grid.is_empty() {
        return Err(Error::Argument("error grid is empty".into()));
    }
    let approx = spec.evaluate_grid(grid)?;
    let mut max_error = 0.0;
    let mut argmax = 0;
    let mut total = crate::sum::CompensatedSum::new();
    for (i, (p, &v)) in grid.points().zip(&approx).enumerate() {
        let e = (v - truth(p)).abs();
        total.add(e);
        if e > max_error {
            max_error = e;
            argmax = i;
        }
    }
    Ok(ErrorReport {
        n: spec.n(),
        max_error,
        argmax_point: grid.point(argmax).to_vec(),
        mean_abs_error: total.value() / grid.len() as f64,
    })
}

/// Everything of an [`OperatorSpec`] except the resolution.
#[derive(Debug, Clone)]
pub struct SpecTemplate {
    pub domain: DomainBox,
    pub kernel: ActivationKernel,
    pub params: StancuParams,
    pub source: FunctionSource,
}

impl SpecTemplate {
    pub fn at(&self, n: u32) -> Result<OperatorSpec> {
        OperatorSpec::new(
            self.domain.clone(),
            self.kernel.clone(),
            n,
            self.params,
            self.source.clone(),
        )
    }
}

/// Which part of the series enters the log-log fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeWindow {
    /// The larger half of the resolutions.
    #[default]
    UpperHalf,
    /// Resolutions with `min_n <= n <= max_n`.
    Range { min_n: u32, max_n: u32 },
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEntry {
    #[serde(flatten)]
    pub report: ErrorReport,
    /// Modulus estimate at `delta = 1/n`.
    pub omega: Option<f64>,
    /// `C * OMEGA_INFLATION * omega`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSeries {
    pub entries: Vec<SeriesEntry>,
    pub window: SlopeWindow,
    /// `None` when every error is below [`DEGENERATE_ERROR`] or the window
    /// holds fewer than two resolutions.
    pub fitted_slope: Option<f64>,
    pub degenerate: bool,
}

impl ConvergenceSeries {
    pub fn from_entries(entries: Vec<SeriesEntry>, window: SlopeWindow) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].report.n >= w[1].report.n) {
            return Err(Error::Argument("series resolutions must be strictly increasing".into()));
        }
        let selected: Vec<&SeriesEntry> = match window {
            SlopeWindow::All => entries.iter().collect(),
            SlopeWindow::UpperHalf => entries[entries.len() / 2..].iter().collect(),
            SlopeWindow::Range { min_n, max_n } => entries
                .iter()
                .filter(|e| (min_n..=max_n).contains(&e.report.n))
                .collect(),
        };
        let all_tiny = entries.iter().all(|e| e.report.max_error < DEGENERATE_ERROR);
        let fitted_slope = if all_tiny {
            None
        } else {
            let points: Vec<(f64, f64)> = selected
                .iter()
                .map(|e| (f64::from(e.report.n), e.report.max_error))
                .collect();
            fit_loglog_slope(&points)
        };
        Ok(Self {
            degenerate: fitted_slope.is_none(),
            entries,
            window,
            fitted_slope,
        })
    }

    /// Builds a series straight from `(n, E_n)` pairs, bypassing evaluation.
    pub fn from_errors(errors: &[(u32, f64)], window: SlopeWindow) -> Result<Self> {
        let entries = errors
            .iter()
            .map(|&(n, e)| SeriesEntry {
                report: ErrorReport {
                    n,
                    max_error: e,
                    argmax_point: Vec::new(),
                    mean_abs_error: e,
                },
                omega: None,
                bound: None,
            })
            .collect();
        Self::from_entries(entries, window)
    }

    pub fn ns(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.report.n).collect()
    }

    pub fn error_at(&self, n: u32) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.report.n == n)
            .map(|e| e.report.max_error)
    }
}

/// Least-squares slope of `log y` against `log x`; points with `y <= 0` are skipped.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx).filter(|s| s.is_finite())
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    pub window: SlopeWindow,
    /// Pairs for the modulus estimate behind the bound column; `None` skips it.
    pub bound_pairs: Option<usize>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            window: SlopeWindow::UpperHalf,
            bound_pairs: Some(DEFAULT_SAMPLE_PAIRS),
        }
    }
}

/// `E_n` for every `n` in `n_list`, computed concurrently and ordered by `n`.
pub fn convergence_series<T>(
    template: &SpecTemplate,
    truth: &T,
    n_list: &[u32],
    grid: &Grid,
    options: SeriesOptions,
) -> Result<ConvergenceSeries>
where
    T: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    if n_list.is_empty() {
        return Err(Error::Argument("empty resolution list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("resolution list must be strictly ascending".into()));
    }
    let per_n = |&n: &u32| -> Result<SeriesEntry> {
        let spec = template.at(n)?;
        let report = max_error(&spec, truth, grid)?;
        let (omega, bound) = match options.bound_pairs {
            Some(pairs) => {
                let m = estimate_modulus(truth, &template.domain, 1.0 / f64::from(n), pairs)?;
                let bound = theoretical_bound(&spec, &m)? * OMEGA_INFLATION;
                (Some(m.omega), Some(bound))
            }
            None => (None, None),
        };
        Ok(SeriesEntry {
            report,
            omega,
            bound,
        })
    };
    let entries = par::map_slice(n_list, |n| {
        per_n(n).map_err(|e| Error::AtResolution {
            n: *n,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ConvergenceSeries::from_entries(entries, options.window)
}

/// Lower estimate of `omega(f, delta) = sup_{|u - v|_inf <= delta} |f(u) - f(v)|` on `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub omega: f64,
}

const MAX_LATTICE_POINTS: usize = 1 << 20;
const MIN_POINTS_PER_AXIS_1D: usize = 4096;
const STEPS_PER_DELTA_1D: f64 = 64.0;
const STEPS_PER_DELTA_ND: usize = 2;
// Relative slack on the distance test so lattice pairs exactly delta apart survive rounding.
const DISTANCE_SLACK: f64 = 1e-9;

/// Estimates the modulus of continuity from two deterministic schemes and
/// returns the larger value:
///
/// - a structured lattice scan over every pair within distance `delta`
///   (a sliding max-min window in one dimension), and
/// - `sample_pairs` quasi-random pairs `(u, clamp(u + delta t))` with `u` in
///   `K` and `t` in `[-1, 1]^d` drawn from an additive recurrence.
///
/// The result is never larger than the true supremum.
pub fn estimate_modulus<F>(
    f: &F,
    domain: &DomainBox,
    delta: f64,
    sample_pairs: usize,
) -> Result<ModulusEstimate>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("modulus needs delta > 0, got {delta}")));
    }
    let structured = if domain.dim() == 1 {
        lattice_scan_1d(f, domain.lower()[0], domain.upper()[0], delta)
    } else {
        lattice_scan_nd(f, domain, delta)
    };
    let sampled = quasi_random_pairs(f, domain, delta, sample_pairs);
    Ok(ModulusEstimate {
        delta,
        omega: structured.max(sampled),
    })
}

fn lattice_scan_1d<F>(f: &F, a: f64, b: f64, delta: f64) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let width = b - a;
    let target = (delta / STEPS_PER_DELTA_1D)
        .min(width / (MIN_POINTS_PER_AXIS_1D - 1) as f64)
        .max(width / (MAX_LATTICE_POINTS - 1) as f64);
    // Keep delta an integer number of steps so pairs exactly delta apart exist.
    let h = if delta <= width {
        delta / (delta / target).round().max(1.0)
    } else {
        target
    };
    let steps = (width / h).floor() as usize;
    let mut xs: Vec<f64> = (0..=steps).map(|i| a + i as f64 * h).filter(|&x| x < b).collect();
    xs.push(b);
    let ys: Vec<f64> = xs.iter().map(|&x| f(&[x])).collect();

    let reach = delta * (1.0 + DISTANCE_SLACK);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut left = 0;
    let mut best: f64 = 0.0;
    for right in 0..xs.len() {
        while xs[right] - xs[left] > reach {
            left += 1;
        }
        while maxq.back().is_some_and(|&j| ys[j] <= ys[right]) {
            maxq.pop_back();
        }
        maxq.push_back(right);
        while minq.back().is_some_and(|&j| ys[j] >= ys[right]) {
            minq.pop_back();
        }
        minq.push_back(right);
        while maxq.front().is_some_and(|&j| j < left) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < left) {
            minq.pop_front();
        }
        let spread = ys[maxq[0]] - ys[minq[0]];
        best = best.max(spread);
    }
    best
}

fn lattice_scan_nd<F>(f: &F, domain: &DomainBox, delta: f64) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let d = domain.dim();
    let per_axis_cap = (MAX_LATTICE_POINTS as f64).powf(1.0 / d as f64).floor().max(2.0) as usize;
    let axes: Vec<Vec<f64>> = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(&a, &b)| {
            let wanted = ((b - a) / delta * STEPS_PER_DELTA_ND as f64).ceil() as usize + 1;
            linspace(a, b, wanted.clamp(2, per_axis_cap))
        })
        .collect();
    let lens: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = lens.iter().product();

    let unravel = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; d];
        for axis in (0..d).rev() {
            idx[axis] = flat % lens[axis];
            flat /= lens[axis];
        }
        idx
    };
    let values: Vec<f64> = (0..total)
        .map(|flat| {
            let idx = unravel(flat);
            let p: Vec<f64> = idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
            f(&p)
        })
        .collect();

    // Offsets with entries in [-J, J], first nonzero entry positive.
    let j = STEPS_PER_DELTA_ND as i64;
    let span = (2 * j + 1) as usize;
    let offsets: Vec<Vec<i64>> = (0..span.pow(d as u32))
        .map(|mut code| {
            (0..d)
                .map(|_| {
                    let v = (code % span) as i64 - j;
                    code /= span;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|m| m.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0))
        .collect();

    let reach = delta * (1.0 + DISTANCE_SLACK);
    let mut best: f64 = 0.0;
    for flat in 0..total {
        let idx = unravel(flat);
        'offsets: for m in &offsets {
            let mut other = 0usize;
            for axis in 0..d {
                let t = idx[axis] as i64 + m[axis];
                if t < 0 || t >= lens[axis] as i64 {
                    continue 'offsets;
                }
                if (axes[axis][t as usize] - axes[axis][idx[axis]]).abs() > reach {
                    continue 'offsets;
                }
                other = other * lens[axis] + t as usize;
            }
            best = best.max((values[flat] - values[other]).abs());
        }
    }
    best
}

// Additive recurrence with the generalized golden ratio in 2d dimensions.
fn quasi_random_pairs<F>(f: &F, domain: &DomainBox, delta: f64, count: usize) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let d = domain.dim();
    let dims = 2 * d;
    let mut phi: f64 = 2.0;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dims as f64 + 1.0));
    }
    let steps: Vec<f64> = (1..=dims).map(|j| phi.powi(-(j as i32)).fract()).collect();
    let mut best: f64 = 0.0;
    let mut u = vec![0.0; d];
    let mut v = vec![0.0; d];
    for i in 0..count {
        for axis in 0..d {
            let (a, b) = (domain.lower()[axis], domain.upper()[axis]);
            let x = (0.5 + (i + 1) as f64 * steps[axis]).fract();
            let t = 2.0 * (0.5 + (i + 1) as f64 * steps[d + axis]).fract() - 1.0;
            u[axis] = a + (b - a) * x;
            v[axis] = (u[axis] + delta * t).clamp(a, b);
        }
        best = best.max((f(&u) - f(&v)).abs());
    }
    best
}

/// `C omega(f, 1/n)` with `C = (M_0 / sigma_eta(1))^d (2 + C_1)`.
pub fn theoretical_bound(spec: &OperatorSpec, modulus: &ModulusEstimate) -> Result<f64> {
    let expected = 1.0 / f64::from(spec.n());
    if (modulus.delta - expected).abs() > 1e-12 * expected {
        return Err(Error::Argument(format!(
            "modulus computed at delta={} but the bound needs delta=1/n={expected}",
            modulus.delta
        )));
    }
    Ok(spec.rate_constant() * modulus.omega)
}

/// Measured `E_n` against the inflated theoretical bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: u32,
    pub measured: f64,
    pub omega_estimate: f64,
    pub inflation: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn check_bound_dominance<T>(
    spec: &OperatorSpec,
    truth: &T,
    grid: &Grid,
    sample_pairs: usize,
) -> Result<BoundCheck>
where
    T: Fn(&[f64]) -> f64 + ?Sized,
{
    let report = max_error(spec, truth, grid)?;
    let modulus = estimate_modulus(truth, spec.domain(), 1.0 / f64::from(spec.n()), sample_pairs)?;
    let bound = OMEGA_INFLATION * theoretical_bound(spec, &modulus)?;
    Ok(BoundCheck {
        n: spec.n(),
        measured: report.max_error,
        omega_estimate: modulus.omega,
        inflation: OMEGA_INFLATION,
        bound,
        holds: report.max_error <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn paper_f(s: &[f64]) -> f64 {
        (s[0] - 0.5).abs() + (6.0 * PI * s[0]).sin()
    }

    fn unit() -> DomainBox {
        DomainBox::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn slope_of_exact_power_law() {
        let errors: Vec<(u32, f64)> = (1..=100).map(|i| (10 * i, 3.0 / f64::from(10 * i))).collect();
        let s = ConvergenceSeries::from_errors(&errors, SlopeWindow::UpperHalf).unwrap();
        assert!((s.fitted_slope.unwrap() + 1.0).abs() < 1e-6);
        assert!(!s.degenerate);
    }

    #[test]
    fn degenerate_series_skips_fit() {
        let s = ConvergenceSeries::from_errors(&[(10, 1e-14), (20, 1e-15)], SlopeWindow::All).unwrap();
        assert!(s.degenerate && s.fitted_slope.is_none());
        let single = ConvergenceSeries::from_errors(&[(10, 0.5)], SlopeWindow::All).unwrap();
        assert!(single.degenerate);
        assert_eq!(single.entries.len(), 1);
    }

    #[test]
    fn series_requires_increasing_n() {
        assert!(ConvergenceSeries::from_errors(&[(20, 0.1), (10, 0.2)], SlopeWindow::All).is_err());
    }

    #[test]
    fn modulus_of_identity() {
        let m = estimate_modulus(&|s: &[f64]| s[0], &unit(), 0.1, 256).unwrap();
        assert!((m.omega - 0.1).abs() < 1e-10, "{}", m.omega);
    }

    #[test]
    fn modulus_saturates_to_range() {
        let cubic = |s: &[f64]| s[0].powi(3);
        let m = estimate_modulus(&cubic, &unit(), 5.0, 256).unwrap();
        assert!((m.omega - 1.0).abs() < 1e-15);
        let bowl = |s: &[f64]| (s[0] - 0.3).powi(2);
        let m = estimate_modulus(&bowl, &unit(), 5.0, 256).unwrap();
        assert!(m.omega <= 0.49 && m.omega > 0.49 - 1e-6);
    }

    #[test]
    fn modulus_of_oscillation_at_long_range() {
        // Exact-distance pairs of sin(6 pi s) at delta = 1/3 all cancel.
        let f = |s: &[f64]| (6.0 * PI * s[0]).sin();
        let m = estimate_modulus(&f, &unit(), 1.0 / 3.0, 0).unwrap();
        assert!(m.omega <= 2.0 && m.omega > 2.0 - 1e-4, "{}", m.omega);
    }

    #[test]
    fn modulus_is_monotone_in_delta() {
        let deltas = [0.001, 0.003, 0.01, 0.03, 0.1, 0.3];
        let omegas: Vec<f64> = deltas
            .iter()
            .map(|&d| estimate_modulus(&paper_f, &unit(), d, 512).unwrap().omega)
            .collect();
        assert!(omegas.windows(2).all(|w| w[0] <= w[1]));
        assert!(omegas[0] < 0.03);
    }

    #[test]
    fn modulus_in_two_dimensions() {
        let d = DomainBox::unit(2).unwrap();
        let f = |s: &[f64]| s[0] + s[1];
        let m = estimate_modulus(&f, &d, 0.1, 1024).unwrap();
        assert!((m.omega - 0.2).abs() < 1e-9, "{}", m.omega);
        assert!(estimate_modulus(&f, &d, 0.0, 8).is_err());
    }

    #[test]
    fn bound_requires_matching_delta() {
        let spec = SpecTemplate {
            domain: unit(),
            kernel: ActivationKernel::logistic(1).unwrap(),
            params: StancuParams::classical(),
            source: FunctionSource::analytic(paper_f),
        }
        .at(100)
        .unwrap();
        let wrong = ModulusEstimate {
            delta: 0.02,
            omega: 1.0,
        };
        assert!(theoretical_bound(&spec, &wrong).is_err());
        let zero = ModulusEstimate {
            delta: 0.01,
            omega: 0.0,
        };
        assert_eq!(theoretical_bound(&spec, &zero).unwrap(), 0.0);
    }

    #[test]
    fn constant_truth_has_no_error() {
        let spec = SpecTemplate {
            domain: unit(),
            kernel: ActivationKernel::logistic(1).unwrap(),
            params: StancuParams::new(1.0, 2.0).unwrap(),
            source: FunctionSource::constant(-2.5),
        }
        .at(30)
        .unwrap();
        let r = max_error(&spec, &|_: &[f64]| -2.5, &Grid::uniform_1d(0.0, 1.0, 301)).unwrap();
        assert!(r.max_error < 1e-12);
        assert!(r.max_error >= r.mean_abs_error);
        assert!(max_error(&spec, &|_: &[f64]| 0.0, &Grid::from_1d(vec![])).is_err());
    }
}
