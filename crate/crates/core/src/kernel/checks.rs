//! Numerical invariant suite for an activation kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::{ActivationKernel, Decay, PERIOD_GRID_POINTS};
use crate::grid::{linspace, unit_grid};

const CHECK_SEED: u64 = 0x5EED_0001;

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheck {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub generator: String,
    pub truncation: u32,
    pub sigma_at_one: f64,
    pub moment_zero: f64,
    pub lipschitz_estimate: f64,
    pub checks: Vec<KernelCheck>,
    pub all_passed: bool,
}

fn check(name: &'static str, residual: f64, threshold: f64) -> KernelCheck {
    KernelCheck {
        name,
        residual,
        threshold,
        passed: residual <= threshold,
    }
}

fn check_strict(name: &'static str, residual: f64, threshold: f64) -> KernelCheck {
    KernelCheck {
        passed: residual < threshold,
        ..check(name, residual, threshold)
    }
}

/// Max of `|sigma_eta'|` from central differences on `[-20, 20]`.
pub(crate) fn lipschitz_estimate(kernel: &ActivationKernel) -> f64 {
    let h = 1e-4;
    linspace(-20.0, 20.0, 400_001)
        .into_iter()
        .map(|s| ((kernel.eval_1d(s + h) - kernel.eval_1d(s - h)) / (2.0 * h)).abs())
        .fold(0.0, f64::max)
}

/// Runs every kernel invariant and records the measured residuals.
pub fn run_checks(kernel: &ActivationKernel) -> KernelReport {
    let g = kernel.generator();
    let period = unit_grid(PERIOD_GRID_POINTS);
    let truncation = kernel.truncation();
    let mut rng = ChaCha20Rng::seed_from_u64(CHECK_SEED);
    let mut checks = Vec::new();

    let partition = period
        .iter()
        .map(|&s| (kernel.partition_sum(s, truncation) - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(check_strict("partition_of_unity", partition, 1e-10));

    let moment_zero = kernel.moment_zero();
    checks.push(check_strict("moment_zero_is_one", (moment_zero - 1.0).abs(), 1e-10));

    let evenness = (0..1000)
        .map(|_| {
            let s: f64 = rng.random_range(-10.0..=10.0);
            (kernel.eval_1d(s) - kernel.eval_1d(-s)).abs()
        })
        .fold(0.0, f64::max);
    checks.push(check_strict("evenness", evenness, 1e-14));

    let most_negative = linspace(-50.0, 50.0, 100_001)
        .into_iter()
        .map(|s| kernel.eval_1d(s))
        .fold(f64::INFINITY, f64::min);
    checks.push(check("nonnegativity", (-most_negative).max(0.0), 0.0));

    let vanish_threshold = match g.decay() {
        Decay::Exponential => 1e-12,
        Decay::Polynomial(rho) => 40f64.powf(-1.0 - rho),
    };
    let at_forty = kernel.eval_1d(40.0).max(kernel.eval_1d(-40.0));
    checks.push(check_strict("vanishing_at_40", at_forty, vanish_threshold));

    let odd = linspace(-40.0, 40.0, 8001)
        .into_iter()
        .map(|s| ((g.eval(s) - 0.5) + (g.eval(-s) - 0.5)).abs())
        .fold(0.0, f64::max);
    checks.push(check("generator_odd_symmetry", odd, 1e-14));

    let sigma_at_one = kernel.eval_1d(1.0);
    let mut denom_violation: f64 = 0.0;
    for n in [5u32, 10, 50] {
        let nf = f64::from(n);
        for &s in &period {
            let acc: crate::sum::CompensatedSum =
                (0..=n).map(|k| kernel.eval_1d(nf * s - f64::from(k))).collect();
            let d = acc.value();
            denom_violation = denom_violation
                .max(sigma_at_one - d)
                .max(d - (1.0 + 1e-12));
        }
    }
    checks.push(check("denominator_lower_bound", denom_violation.max(0.0), 0.0));

    let lipschitz = lipschitz_estimate(kernel);
    let lip_excess = (0..2000)
        .map(|_| {
            let s: f64 = rng.random_range(-15.0..=15.0);
            let t: f64 = rng.random_range(-15.0..=15.0);
            let lhs = (kernel.eval_1d(s) - kernel.eval_1d(t)).abs();
            let rhs = lipschitz * (s - t).abs() * (1.0 + 1e-6) + 1e-15;
            (lhs - rhs).max(0.0)
        })
        .fold(0.0, f64::max);
    checks.push(check("lipschitz", lip_excess, 0.0));

    let h = 0.01;
    let concavity = (1..2000)
        .map(|i| {
            let s = i as f64 * h;
            g.eval(s + h) - 2.0 * g.eval(s) + g.eval(s - h)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(check("generator_concavity", concavity.max(0.0), 1e-10));

    let t200 = kernel.tail_mass(200, 0.1, &period, (0.0, 1.0));
    let t400 = kernel.tail_mass(400, 0.1, &period, (0.0, 1.0));
    checks.push(check_strict("localization_n200", t200, 1e-6));
    checks.push(KernelCheck {
        name: "localization_decreasing",
        residual: t400,
        threshold: t200,
        passed: t400 < t200 || (t200 == 0.0 && t400 == 0.0),
    });

    let all_passed = checks.iter().all(|c| c.passed);
    KernelReport {
        generator: g.name().to_string(),
        truncation,
        sigma_at_one,
        moment_zero,
        lipschitz_estimate: lipschitz,
        checks,
        all_passed,
    }
}
