//! Sigmoidal generators and the activation kernel built from them.

mod checks;
mod generator;

pub use checks::{run_checks, KernelCheck, KernelReport};
pub use generator::{Decay, GeneratorKind, SigmoidalGenerator};

use crate::error::{Error, Result};
use crate::grid::unit_grid;
use crate::sum::CompensatedSum;

/// Half-width `|s - k| <= 40` used for sums over all integers.
pub const DEFAULT_TRUNCATION: u32 = 40;

/// Points per unit period for sup-type quantities (moments, tail mass).
pub const PERIOD_GRID_POINTS: usize = 101;

/// `sigma_eta(s) = (eta(s + 1) - eta(s - 1)) / 2` and its `d`-fold tensor product.
#[derive(Debug, Clone)]
pub struct ActivationKernel {
    generator: SigmoidalGenerator,
    dimension: usize,
    truncation: u32,
}

impl ActivationKernel {
    pub fn new(generator: SigmoidalGenerator, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Argument("kernel dimension must be at least 1".into()));
        }
        Ok(Self {
            generator,
            dimension,
            truncation: DEFAULT_TRUNCATION,
        })
    }

    pub fn logistic(dimension: usize) -> Result<Self> {
        Self::new(SigmoidalGenerator::logistic(), dimension)
    }

    /// Half-width of the window used wherever a sum runs over all of `Z`.
    pub fn with_truncation(mut self, truncation: u32) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_dimension(&self, dimension: usize) -> Result<Self> {
        Ok(Self::new(self.generator.clone(), dimension)?.with_truncation(self.truncation))
    }

    pub fn generator(&self) -> &SigmoidalGenerator {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// One-dimensional kernel value.
    ///
    /// Evaluated on the left tail only (`sigma_eta` is even), so large `|s|`
    /// gives small numbers instead of a difference of two values near 1.
    #[inline]
    pub fn eval_1d(&self, s: f64) -> f64 {
        let t = -s.abs();
        0.5 * (self.generator.eval(t + 1.0) - self.generator.eval(t - 1.0))
    }

    pub fn eval_nd(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.dimension {
            return Err(Error::Argument(format!(
                "kernel of dimension {} evaluated at a point of dimension {}",
                self.dimension,
                s.len()
            )));
        }
        Ok(s.iter().map(|&x| self.eval_1d(x)).product())
    }

    /// `sum_{|s - k| <= truncation} sigma_eta(s - k)`.
    pub fn partition_sum(&self, s: f64, truncation: u32) -> f64 {
        self.windowed_moment_sum(s, 0.0, truncation)
    }

    fn windowed_moment_sum(&self, s: f64, r: f64, truncation: u32) -> f64 {
        let t = f64::from(truncation);
        let lo = (s - t).ceil() as i64;
        let hi = (s + t).floor() as i64;
        let acc: CompensatedSum = (lo..=hi)
            .map(|k| {
                let x = s - k as f64;
                let w = self.eval_1d(x);
                if r == 0.0 {
                    w
                } else {
                    w * x.abs().powf(r)
                }
            })
            .collect();
        acc.value()
    }

    /// Truncated discrete absolute moment of order `r`: the max over `grid`
    /// of `sum_{|s - k| <= truncation} sigma_eta(s - k) |s - k|^r`.
    ///
    /// A lower bound on the full moment, increasing to it with `truncation`.
    pub fn discrete_moment(&self, r: f64, truncation: u32, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&s| self.windowed_moment_sum(s, r, truncation))
            .fold(0.0, f64::max)
    }

    /// `M_0` with this kernel's truncation over the default unit-period grid.
    pub fn moment_zero(&self) -> f64 {
        self.discrete_moment(0.0, self.truncation, &unit_grid(PERIOD_GRID_POINTS))
    }

    /// Kernel mass away from the diagonal: the max over `grid` of
    /// `sum_{|n s - k| > n delta} sigma_eta(n s - k)`, the sum truncated at
    /// `|n s - k| <= n (b - a) + n delta + 50` for `interval = (a, b)`.
    pub fn tail_mass(&self, n: u32, delta: f64, grid: &[f64], interval: (f64, f64)) -> f64 {
        let n = f64::from(n);
        let cut = n * delta;
        let window = n * (interval.1 - interval.0) + cut + 50.0;
        grid.iter()
            .map(|&s| {
                let x = n * s;
                let lo = (x - window).ceil() as i64;
                let hi = (x + window).floor() as i64;
                let acc: CompensatedSum = (lo..=hi)
                    .filter_map(|k| {
                        let u = x - k as f64;
                        (u.abs() > cut).then(|| self.eval_1d(u))
                    })
                    .collect();
                acc.value()
            })
            .fold(0.0, f64::max)
    }

    /// `||sigma_eta||_{L^1}` by composite Simpson on `[-half_width, half_width]`.
    pub fn l1_norm(&self, half_width: f64, panels: usize) -> f64 {
        let panels = panels.max(2) & !1;
        let h = 2.0 * half_width / panels as f64;
        let mut acc = CompensatedSum::new();
        for i in 0..=panels {
            let x = -half_width + i as f64 * h;
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc.add(w * self.eval_1d(x));
        }
        acc.value() * h / 3.0
    }
}
