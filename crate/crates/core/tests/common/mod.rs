//! Reference implementations used as test oracles.
//!
//! Nothing here calls into the library's kernel or operator code. The
//! logistic kernel is evaluated through the closed form
//! `(eta(x + 1) - eta(x - 1)) / 2 = sinh(1) / (2 (cosh x + cosh 1))`,
//! and operator sums run over the whole index set.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn sigma(x: f64) -> f64 {
    0.5 * 1f64.sinh() / (x.cosh() + 1f64.cosh())
}

pub fn paper_f(s: f64) -> f64 {
    (s - 0.5).abs() + (6.0 * PI * s).sin()
}

/// Integer range `ceil(n a) ..= floor(n b)` computed in exact rational arithmetic
/// for decimal endpoints given as `num / den`.
pub fn index_range(n: i64, a_num: i64, b_num: i64, den: i64) -> (i64, i64) {
    let lo = (n * a_num).div_euclid(den) + i64::from((n * a_num).rem_euclid(den) != 0);
    let hi = (n * b_num).div_euclid(den);
    (lo, hi)
}

/// Full-sum operator on `[a, b]` with nodes `(k + alpha) / (n + beta)`.
pub fn operator_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: u32, alpha: f64, beta: f64, s: f64) -> f64 {
    let nf = f64::from(n);
    let lo = (nf * a).ceil() as i64;
    let hi = (nf * b).floor() as i64;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in lo..=hi {
        let w = sigma(nf * s - k as f64);
        num += w * f((k as f64 + alpha) / (nf + beta));
        den += w;
    }
    num / den
}

pub fn classical_1d(f: impl Fn(f64) -> f64, n: u32, s: f64) -> f64 {
    operator_1d(f, 0.0, 1.0, n, 0.0, 0.0, s)
}

/// Exhaustive double sum on `[0, 1]^2`.
pub fn operator_2d(f: impl Fn(f64, f64) -> f64, n: u32, alpha: f64, beta: f64, s: (f64, f64)) -> f64 {
    let nf = f64::from(n);
    let node = |k: i64| (k as f64 + alpha) / (nf + beta);
    let mut num = 0.0;
    let mut den = 0.0;
    for k1 in 0..=i64::from(n) {
        for k2 in 0..=i64::from(n) {
            let w = sigma(nf * s.0 - k1 as f64) * sigma(nf * s.1 - k2 as f64);
            num += w * f(node(k1), node(k2));
            den += w;
        }
    }
    num / den
}

/// Small deterministic generator (SplitMix64) for test inputs.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn int(&mut self, lo: u32, hi: u32) -> u32 {
        lo + (self.next_u64() % u64::from(hi - lo + 1)) as u32
    }
}

/// Brute-force modulus lower bound from `pairs` equispaced pairs `(u, u + delta)`.
pub fn modulus_pairs(f: impl Fn(f64) -> f64, delta: f64, pairs: usize) -> f64 {
    (0..pairs)
        .map(|i| {
            let u = (1.0 - delta) * i as f64 / (pairs - 1) as f64;
            (f(u + delta) - f(u)).abs()
        })
        .fold(0.0, f64::max)
}
