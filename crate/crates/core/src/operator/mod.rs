//! Index sets, perturbed nodes and evaluation of the Stancu-type operator.

mod domain;
mod source;

pub use domain::{
    index_set, node_bounds, perturbed_node, shift_constant, DomainBox, IndexSet, StancuParams,
};
pub use source::{AnalyticFn, Extension, FunctionSource, SampledValues};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::ActivationKernel;
use crate::par;
use crate::sum::CompensatedSum;

/// `(M_0 / sigma_eta(1))^d`, the operator norm bound on `C(K)`.
pub fn boundedness_constant(kernel: &ActivationKernel) -> f64 {
    let ratio = kernel.moment_zero() / kernel.eval_1d(1.0);
    ratio.powi(kernel.dimension() as i32)
}

/// One fully specified operator `F_n^{(alpha, beta)}` applied to a fixed source.
///
/// Construction evaluates the source at every perturbed node once; evaluation
/// is then a pure weighted average and safe to share across threads.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    domain: DomainBox,
    kernel: ActivationKernel,
    n: u32,
    params: StancuParams,
    source: FunctionSource,
    index: IndexSet,
    strides: Vec<usize>,
    node_values: Vec<f64>,
}

impl OperatorSpec {
    pub fn new(
        domain: DomainBox,
        kernel: ActivationKernel,
        n: u32,
        params: StancuParams,
        source: FunctionSource,
    ) -> Result<Self> {
        if kernel.dimension() != domain.dim() {
            return Err(Error::Argument(format!(
                "kernel dimension {} does not match domain dimension {}",
                kernel.dimension(),
                domain.dim()
            )));
        }
        let index = IndexSet::new(&domain, n)?;
        let node_values = source.node_values(&domain, &index, |k| perturbed_node(k, n, &params))?;
        let strides = index.strides();
        Ok(Self {
            domain,
            kernel,
            n,
            params,
            source,
            index,
            strides,
            node_values,
        })
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn kernel(&self) -> &ActivationKernel {
        &self.kernel
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> &StancuParams {
        &self.params
    }

    pub fn source(&self) -> &FunctionSource {
        &self.source
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }

    /// Source values at the perturbed nodes, row-major over the index set.
    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn node_bounds(&self) -> Vec<(f64, f64)> {
        node_bounds(&self.domain, self.n, &self.params)
    }

    pub fn shift_constant(&self) -> f64 {
        shift_constant(&self.domain, &self.params)
    }

    /// `(M_0 / sigma_eta(1))^d (2 + C_1)`, the constant in `|F f - f| <= C omega(f, 1/n)`.
    pub fn rate_constant(&self) -> f64 {
        boundedness_constant(&self.kernel) * (2.0 + self.shift_constant())
    }

    fn check_point(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.domain.dim() {
            return Err(Error::Argument(format!(
                "point of dimension {} for a {}-dimensional operator",
                s.len(),
                self.domain.dim()
            )));
        }
        if !self.domain.contains(s) {
            return Err(Error::Argument(format!("point {s:?} lies outside the domain")));
        }
        Ok(())
    }

    pub fn evaluate(&self, s: &[f64]) -> Result<f64> {
        self.check_point(s)?;
        self.evaluate_unchecked(s)
    }

    pub fn evaluate_1d(&self, s: f64) -> Result<f64> {
        self.evaluate(&[s])
    }

    // Weighted average over the part of Lambda_n within the kernel truncation
    // of n s. Terms are added in row-major order, so each point's value does
    // not depend on how points are scheduled.
    fn evaluate_unchecked(&self, s: &[f64]) -> Result<f64> {
        let d = s.len();
        let nf = f64::from(self.n);
        let t = f64::from(self.kernel.truncation());

        let mut lo = Vec::with_capacity(d);
        let mut weights: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut base = 0usize;
        for (axis, (&x, &(rlo, rhi))) in s.iter().zip(self.index.ranges()).enumerate() {
            let c = nf * x;
            let wlo = ((c - t).ceil() as i64).max(rlo);
            let whi = ((c + t).floor() as i64).min(rhi);
            if wlo > whi {
                return Err(Error::Argument(format!(
                    "no index within truncation {t} of n*s on axis {axis}"
                )));
            }
            weights.push((wlo..=whi).map(|k| self.kernel.eval_1d(c - k as f64)).collect());
            base += (wlo - rlo) as usize * self.strides[axis];
            lo.push(wlo);
        }

        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        if d == 1 {
            for (j, &w) in weights[0].iter().enumerate() {
                num.add(w * self.node_values[base + j]);
                den.add(w);
            }
        } else {
            let mut pos = vec![0usize; d];
            'outer: loop {
                let mut w = 1.0;
                let mut offset = base;
                for axis in 0..d {
                    w *= weights[axis][pos[axis]];
                    offset += pos[axis] * self.strides[axis];
                }
                num.add(w * self.node_values[offset]);
                den.add(w);

                let mut axis = d;
                loop {
                    if axis == 0 {
                        break 'outer;
                    }
                    axis -= 1;
                    pos[axis] += 1;
                    if pos[axis] < weights[axis].len() {
                        break;
                    }
                    pos[axis] = 0;
                }
            }
        }

        let den = den.value();
        if den <= 0.0 {
            return Err(Error::Argument(format!("vanishing denominator at {s:?}")));
        }
        Ok(num.value() / den)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        grid.points().try_for_each(|p| self.check_point(p))
    }

    /// Pointwise [`evaluate`](Self::evaluate) over `grid`, in grid order.
    /// Uses rayon when the `parallel` feature is on; output is bitwise equal
    /// to [`evaluate_grid_sequential`](Self::evaluate_grid_sequential).
    pub fn evaluate_grid(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        par::map_chunks(grid.coords(), grid.dim(), |p| self.evaluate_unchecked(p))
            .into_iter()
            .collect()
    }

    pub fn evaluate_grid_sequential(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        grid.points().map(|p| self.evaluate_unchecked(p)).collect()
    }
}
