use std::fmt;
use std::sync::Arc;

use super::domain::{DomainBox, IndexSet};
use crate::error::{Error, Result};

pub type AnalyticFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// How an analytic function is evaluated at perturbed nodes outside `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// Evaluate the formula directly; fall back to [`Extension::Clamp`] where
    /// it returns a non-finite value.
    #[default]
    Direct,
    /// Project the node onto `K` coordinatewise before evaluating.
    Clamp,
}

/// Values `y_k` on a rectangular block of integer indices at resolution `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledValues {
    n: u32,
    ranges: Vec<(i64, i64)>,
    values: Vec<f64>,
}

impl SampledValues {
    pub fn new(n: u32, ranges: Vec<(i64, i64)>, values: Vec<f64>) -> Result<Self> {
        if ranges.is_empty() || ranges.iter().any(|&(lo, hi)| lo > hi) {
            return Err(Error::Data("sampled index ranges must be nonempty".into()));
        }
        let expected: usize = ranges.iter().map(|&(lo, hi)| (hi - lo + 1) as usize).product();
        if values.len() != expected {
            return Err(Error::Data(format!(
                "expected {expected} samples for ranges {ranges:?}, got {}",
                values.len()
            )));
        }
        Ok(Self { n, ranges, values })
    }

    /// One-dimensional samples `y_first, y_{first+1}, ...`.
    pub fn from_1d(n: u32, first: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("no samples".into()));
        }
        let last = first + values.len() as i64 - 1;
        Self::new(n, vec![(first, last)], values)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: &[i64]) -> Option<f64> {
        if k.len() != self.ranges.len() {
            return None;
        }
        let mut offset = 0usize;
        for (&ki, &(lo, hi)) in k.iter().zip(&self.ranges) {
            if ki < lo || ki > hi {
                return None;
            }
            offset = offset * (hi - lo + 1) as usize + (ki - lo) as usize;
        }
        Some(self.values[offset])
    }
}

/// The function the operator is applied to.
#[derive(Clone)]
pub enum FunctionSource {
    Analytic { f: AnalyticFn, extension: Extension },
    /// Data `y_k` attached to index `k`; the perturbation moves only the
    /// node label, the stored value is used as is.
    Sampled(SampledValues),
}

impl fmt::Debug for FunctionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSource::Analytic { extension, .. } => f
                .debug_struct("Analytic")
                .field("extension", extension)
                .finish_non_exhaustive(),
            FunctionSource::Sampled(s) => f.debug_tuple("Sampled").field(s).finish(),
        }
    }
}

impl FunctionSource {
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        FunctionSource::Analytic {
            f: Arc::new(f),
            extension: Extension::Direct,
        }
    }

    pub fn analytic_1d<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::analytic(move |s: &[f64]| f(s[0]))
    }

    pub fn constant(c: f64) -> Self {
        Self::analytic(move |_: &[f64]| c)
    }

    pub fn with_extension(self, extension: Extension) -> Self {
        match self {
            FunctionSource::Analytic { f, .. } => FunctionSource::Analytic { f, extension },
            other => other,
        }
    }

    /// Values at every perturbed node of `index`, row-major.
    pub(crate) fn node_values(
        &self,
        domain: &DomainBox,
        index: &IndexSet,
        node: impl Fn(&[i64]) -> Vec<f64>,
    ) -> Result<Vec<f64>> {
        match self {
            FunctionSource::Analytic { f, extension } => index
                .iter()
                .map(|k| {
                    let x = node(&k);
                    let direct = match extension {
                        Extension::Direct => f(&x),
                        Extension::Clamp => f64::NAN,
                    };
                    let v = if direct.is_finite() {
                        direct
                    } else {
                        f(&domain.clamp(&x))
                    };
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Data(format!("function is not finite at node {x:?}")))
                    }
                })
                .collect(),
            FunctionSource::Sampled(samples) => {
                if samples.n() != index.n() {
                    return Err(Error::Data(format!(
                        "samples were taken at n={} but the operator has n={}",
                        samples.n(),
                        index.n()
                    )));
                }
                index
                    .iter()
                    .map(|k| {
                        samples
                            .get(&k)
                            .ok_or_else(|| Error::Data(format!("no sample for index {k:?}")))
                    })
                    .collect()
            }
        }
    }
}
