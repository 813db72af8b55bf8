use crate::error::{Error, Result};

/// A flat list of points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    coords: Vec<f64>,
}

/// `count` equispaced points on `[lo, hi]`, endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

/// Uniform grid over one unit period `[0, 1]`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    linspace(0.0, 1.0, count)
}

impl Grid {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("grid dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Argument(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Argument("empty point list".into()))?;
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Argument(format!(
                "mixed point dimensions {dim} and {}",
                bad.len()
            )));
        }
        Self::new(dim, points.concat())
    }

    pub fn from_1d(values: Vec<f64>) -> Self {
        Self {
            dim: 1,
            coords: values,
        }
    }

    pub fn uniform_1d(lo: f64, hi: f64, count: usize) -> Self {
        Self::from_1d(linspace(lo, hi, count))
    }

    /// Tensor-product grid with `per_axis` points along each axis of the box.
    pub fn tensor(lower: &[f64], upper: &[f64], per_axis: usize) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Argument("tensor grid bounds mismatch".into()));
        }
        let axes: Vec<Vec<f64>> = lower
            .iter()
            .zip(upper)
            .map(|(&a, &b)| linspace(a, b, per_axis))
            .collect();
        let dim = axes.len();
        let total = per_axis.pow(dim as u32);
        let mut coords = Vec::with_capacity(total * dim);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            coords.extend(idx.iter().zip(&axes).map(|(&i, axis)| axis[i]));
            for j in (0..dim).rev() {
                idx[j] += 1;
                if idx[j] < per_axis {
                    break;
                }
                idx[j] = 0;
            }
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
}
