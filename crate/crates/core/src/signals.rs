//! Synthetic ECG, seeded Gaussian noise and denoising by the operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{unit_grid, Grid};
use crate::kernel::ActivationKernel;
use crate::operator::{DomainBox, FunctionSource, OperatorSpec, SampledValues, StancuParams};

/// Recorded next to every noisy signal so runs can be replayed elsewhere.
pub const NOISE_GENERATOR: &str =
    "ChaCha20Rng::seed_from_u64 + rand_distr 0.5 StandardNormal (ziggurat), one draw per sample in k order";

/// RMSE evaluation grid size on `[0, 1]`.
pub const DEFAULT_EVAL_POINTS: usize = 1000;

/// One Gaussian bump `amplitude * exp(-((s - center) / width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgModel {
    components: Vec<Wave>,
}

impl Default for EcgModel {
    /// P, Q, R, S and T waves.
    fn default() -> Self {
        let wave = |amplitude, center, width| Wave {
            amplitude,
            center,
            width,
        };
        Self {
            components: vec![
                wave(1.2, 0.25, 0.03),
                wave(-2.5, 0.30, 0.01),
                wave(4.0, 0.32, 0.008),
                wave(-1.8, 0.35, 0.015),
                wave(1.5, 0.60, 0.05),
            ],
        }
    }
}

impl EcgModel {
    pub fn new(components: Vec<Wave>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Argument("ECG model needs at least one wave".into()));
        }
        if let Some(w) = components.iter().find(|w| !(w.width > 0.0)) {
            return Err(Error::Argument(format!("wave width must be positive, got {}", w.width)));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Wave] {
        &self.components
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.components
            .iter()
            .map(|w| {
                let z = (s - w.center) / w.width;
                w.amplitude * (-z * z).exp()
            })
            .sum()
    }
}

pub fn ecg_truth(model: &EcgModel, s: f64) -> f64 {
    model.eval(s)
}

/// Noisy samples `y_k = f(k/n) + e_k` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub n: u32,
    pub values: Vec<f64>,
    pub noise_std: f64,
    pub seed: u64,
}

impl SampledSignal {
    pub fn new(n: u32, values: Vec<f64>, noise_std: f64, seed: u64) -> Result<Self> {
        if values.len() != n as usize + 1 {
            return Err(Error::Data(format!(
                "signal at n={n} needs {} samples (k = 0..=n), got {}",
                n + 1,
                values.len()
            )));
        }
        if !(noise_std >= 0.0 && noise_std.is_finite()) {
            return Err(Error::Argument(format!("noise_std must be >= 0, got {noise_std}")));
        }
        Ok(Self {
            n,
            values,
            noise_std,
            seed,
        })
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 / f64::from(self.n)
    }

    /// Sample whose node `k/n` is closest to `s`.
    pub fn nearest(&self, s: f64) -> f64 {
        let k = (s * f64::from(self.n)).round().clamp(0.0, f64::from(self.n)) as usize;
        self.values[k]
    }

    pub fn to_source(&self) -> Result<FunctionSource> {
        Ok(FunctionSource::Sampled(SampledValues::from_1d(
            self.n,
            0,
            self.values.clone(),
        )?))
    }
}

/// Samples the model at `k/n`, `k = 0..=n`, adding i.i.d. `N(0, noise_std^2)` noise.
///
/// The endpoint `k = n` is included so the sampled source covers the whole
/// index set of `[0, 1]`.
pub fn sample_noisy(model: &EcgModel, n: u32, noise_std: f64, seed: u64) -> Result<SampledSignal> {
    if n < 2 {
        return Err(Error::Argument(format!("need n >= 2 samples, got {n}")));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::Argument(format!("noise_std must be >= 0, got {noise_std}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let nf = f64::from(n);
    let values = (0..=n)
        .map(|k| {
            let clean = model.eval(f64::from(k) / nf);
            let e: f64 = rng.sample(StandardNormal);
            if noise_std == 0.0 {
                clean
            } else {
                clean + noise_std * e
            }
        })
        .collect();
    SampledSignal::new(n, values, noise_std, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenoiseParams {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub noise_std: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseResult {
    pub grid: Vec<f64>,
    pub truth: Vec<f64>,
    pub reconstruction: Vec<f64>,
    pub rmse: f64,
    pub params: DenoiseParams,
}

impl DenoiseResult {
    /// Grid point where the reconstruction peaks.
    pub fn argmax(&self) -> f64 {
        let i = self
            .reconstruction
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > self.reconstruction[best] { i } else { best });
        self.grid[i]
    }
}

/// Applies the operator on `[0, 1]` to the samples and scores it against the model.
pub fn denoise(
    signal: &SampledSignal,
    params: StancuParams,
    eval_grid: &[f64],
    model: &EcgModel,
) -> Result<DenoiseResult> {
    if let Some(&bad) = eval_grid.iter().find(|&&s| !(0.0..=1.0).contains(&s)) {
        return Err(Error::Argument(format!("grid point {bad} outside [0, 1]")));
    }
    let spec = OperatorSpec::new(
        DomainBox::unit(1)?,
        ActivationKernel::logistic(1)?,
        signal.n,
        params,
        signal.to_source()?,
    )?;
    let grid = Grid::from_1d(eval_grid.to_vec());
    let reconstruction = spec.evaluate_grid(&grid)?;
    let truth: Vec<f64> = eval_grid.iter().map(|&s| model.eval(s)).collect();
    let rmse = rmse(&reconstruction, &truth)?;
    Ok(DenoiseResult {
        grid: eval_grid.to_vec(),
        truth,
        reconstruction,
        rmse,
        params: DenoiseParams {
            n: signal.n,
            alpha: params.alpha(),
            beta: params.beta(),
            noise_std: signal.noise_std,
            seed: signal.seed,
        },
    })
}

/// Default RMSE grid: 1000 uniform points on `[0, 1]`.
pub fn default_eval_grid() -> Vec<f64> {
    unit_grid(DEFAULT_EVAL_POINTS)
}

pub fn rmse(reconstruction: &[f64], truth: &[f64]) -> Result<f64> {
    if reconstruction.len() != truth.len() {
        return Err(Error::Argument(format!(
            "rmse of vectors with lengths {} and {}",
            reconstruction.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Argument("rmse of empty vectors".into()));
    }
    let sq: crate::sum::CompensatedSum = reconstruction
        .iter()
        .zip(truth)
        .map(|(r, t)| (r - t) * (r - t))
        .collect();
    Ok((sq.value() / truth.len() as f64).sqrt())
}
