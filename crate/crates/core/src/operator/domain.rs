use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compact box `[a_1, b_1] x ... x [a_d, b_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Argument(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Argument(format!("axis {i}: need finite a < b, got [{a}, {b}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, s: &[f64]) -> bool {
        s.len() == self.dim()
            && s.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&a, &b))| a <= x && x <= b)
    }

    /// Nearest point of the box in every norm that splits over coordinates.
    pub fn clamp(&self, s: &[f64]) -> Vec<f64> {
        s.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&a, &b))| x.clamp(a, b))
            .collect()
    }

    /// Largest side length, the max-norm diameter.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coordinate(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.upper)
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

/// Node perturbation `k / n -> (k + alpha) / (n + beta)` with `0 <= alpha <= beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StancuParams {
    alpha: f64,
    beta: f64,
}

impl StancuParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 0.0 <= alpha && alpha <= beta) {
            return Err(Error::Argument(format!(
                "Stancu parameters need 0 <= alpha <= beta, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `alpha = beta = 0`, the unperturbed operator.
    pub fn classical() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn node(&self, k: i64, n: u32) -> f64 {
        (k as f64 + self.alpha) / (f64::from(n) + self.beta)
    }
}

// Products like 10 * 0.3 land one ulp off an integer; treat those as exact.
fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= 1e-12 * x.abs().max(1.0)).then_some(r)
}

fn ceil_snapped(x: f64) -> i64 {
    near_integer(x).unwrap_or_else(|| x.ceil()) as i64
}

fn floor_snapped(x: f64) -> i64 {
    near_integer(x).unwrap_or_else(|| x.floor()) as i64
}

/// Integer multi-indices `ceil(n a_i) <= k_i <= floor(n b_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    n: u32,
    ranges: Vec<(i64, i64)>,
}

impl IndexSet {
    pub fn new(domain: &DomainBox, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("resolution n must be at least 1".into()));
        }
        let nf = f64::from(n);
        let ranges = domain
            .lower()
            .iter()
            .zip(domain.upper())
            .enumerate()
            .map(|(axis, (&a, &b))| {
                let lo = ceil_snapped(nf * a);
                let hi = floor_snapped(nf * b);
                if lo > hi {
                    Err(Error::Resolution { n, axis, lo, hi })
                } else {
                    Ok((lo, hi))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, ranges })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        let (lo, hi) = self.ranges[axis];
        (hi - lo + 1) as usize
    }

    pub fn cardinality(&self) -> usize {
        (0..self.dim()).map(|i| self.axis_len(i)).product()
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dim()];
        for i in (0..self.dim().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axis_len(i + 1);
        }
        strides
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.dim()
            && k.iter()
                .zip(&self.ranges)
                .all(|(&ki, &(lo, hi))| lo <= ki && ki <= hi)
    }

    /// Row-major position of `k`, `None` when outside the set.
    pub fn offset(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        Some(
            k.iter()
                .zip(&self.ranges)
                .zip(self.strides())
                .map(|((&ki, &(lo, _)), stride)| (ki - lo) as usize * stride)
                .sum(),
        )
    }

    /// Every multi-index in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let mut current: Option<Vec<i64>> = Some(self.ranges.iter().map(|r| r.0).collect());
        std::iter::from_fn(move || {
            let out = current.clone()?;
            let mut next = out.clone();
            let mut axis = next.len();
            loop {
                if axis == 0 {
                    current = None;
                    break;
                }
                axis -= 1;
                if next[axis] < self.ranges[axis].1 {
                    next[axis] += 1;
                    current = Some(next);
                    break;
                }
                next[axis] = self.ranges[axis].0;
            }
            Some(out)
        })
    }
}

pub fn index_set(domain: &DomainBox, n: u32) -> Result<IndexSet> {
    IndexSet::new(domain, n)
}

/// `s_k = ((k_i + alpha) / (n + beta))_i`.
pub fn perturbed_node(k: &[i64], n: u32, params: &StancuParams) -> Vec<f64> {
    k.iter().map(|&ki| params.node(ki, n)).collect()
}

/// Per-axis interval guaranteed to contain every perturbed node over `Lambda_n`:
/// `[a - beta a / (n + beta), b + beta / (n + beta)]`.
///
/// For `b < 0` the upper end becomes `(n b + beta) / (n + beta)`, which is
/// the bound that actually holds there.
pub fn node_bounds(domain: &DomainBox, n: u32, params: &StancuParams) -> Vec<(f64, f64)> {
    let nf = f64::from(n);
    let beta = params.beta();
    let denom = nf + beta;
    domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(&a, &b)| {
            let lo = a - beta * a / denom;
            let hi = b + beta * (1.0 - b.min(0.0)) / denom;
            (lo, hi)
        })
        .collect()
}

/// `C_1` with `|(k + alpha)/(n + beta) - k/n| <= C_1 / n` for all `k` in `Lambda_n`:
/// `alpha + beta * max_i max(|a_i|, |b_i|)`.
pub fn shift_constant(domain: &DomainBox, params: &StancuParams) -> f64 {
    params.alpha() + params.beta() * domain.max_abs_coordinate()
}
