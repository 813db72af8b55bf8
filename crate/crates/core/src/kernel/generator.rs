use std::fmt;

use crate::error::{Error, Result};

/// Tail behaviour of a generator, `eta(s) = O(|s|^{-1-rho})` as `s -> -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Faster than any power; every moment is finite.
    Exponential,
    /// Polynomial decay with exponent `rho > 0`.
    Polynomial(f64),
}

impl Decay {
    /// The decay exponent, `+inf` for exponential tails.
    pub fn rho(self) -> f64 {
        match self {
            Decay::Exponential => f64::INFINITY,
            Decay::Polynomial(rho) => rho,
        }
    }
}

#[derive(Clone)]
pub enum GeneratorKind {
    /// `1 / (1 + e^{-s})`.
    Logistic,
    /// `(1 + s / sqrt(1 + s^2)) / 2`, polynomial decay with `rho = 1`.
    Algebraic,
    /// User-registered generator, validated numerically on construction.
    Custom { name: String, eta: fn(f64) -> f64 },
}

impl fmt::Debug for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Logistic => f.write_str("Logistic"),
            GeneratorKind::Algebraic => f.write_str("Algebraic"),
            GeneratorKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A sigmoidal function `eta` satisfying odd symmetry of `eta - 1/2`,
/// concavity on `[0, inf)` and a power-law (or faster) tail.
#[derive(Debug, Clone)]
pub struct SigmoidalGenerator {
    kind: GeneratorKind,
    decay: Decay,
}

impl SigmoidalGenerator {
    pub fn logistic() -> Self {
        Self {
            kind: GeneratorKind::Logistic,
            decay: Decay::Exponential,
        }
    }

    pub fn algebraic() -> Self {
        Self {
            kind: GeneratorKind::Algebraic,
            decay: Decay::Polynomial(1.0),
        }
    }

    /// Registers a custom generator after checking the sigmoidal conditions
    /// numerically. `eta` must be accurate for negative arguments; the kernel
    /// only ever evaluates the left tail.
    pub fn custom(name: impl Into<String>, eta: fn(f64) -> f64, decay: Decay) -> Result<Self> {
        if let Decay::Polynomial(rho) = decay {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::Config(format!("decay exponent must be positive, got {rho}")));
            }
        }
        let g = Self {
            kind: GeneratorKind::Custom {
                name: name.into(),
                eta,
            },
            decay,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "logistic" => Ok(Self::logistic()),
            "algebraic" => Ok(Self::algebraic()),
            other => Err(Error::Config(format!("unsupported generator kind '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            GeneratorKind::Logistic => "logistic",
            GeneratorKind::Algebraic => "algebraic",
            GeneratorKind::Custom { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn rho(&self) -> f64 {
        self.decay.rho()
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match &self.kind {
            GeneratorKind::Logistic => 1.0 / (1.0 + (-s).exp()),
            GeneratorKind::Algebraic => {
                let r = s.mul_add(s, 1.0).sqrt();
                if s < 0.0 {
                    // (r + s)(r - s) = 1 avoids cancelling 1/2 - |s|/(2r).
                    0.5 / (r * (r - s))
                } else {
                    0.5 * (1.0 + s / r)
                }
            }
            GeneratorKind::Custom { eta, .. } => eta(s),
        }
    }

    /// Numerical check of monotonicity, odd symmetry of `eta - 1/2`,
    /// `eta(1) < 1`, the tail limits and concavity on `[0, 20]`.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Config(format!("generator '{}': {what}", self.name())));

        let step = 0.01;
        let mut prev = self.eval(-60.0);
        for i in 1..=12_000 {
            let s = -60.0 + i as f64 * step;
            let v = self.eval(s);
            if !v.is_finite() {
                return fail(format!("non-finite value at s={s}"));
            }
            if v < prev {
                return fail(format!("not increasing near s={s}"));
            }
            let odd = (v - 0.5) + (self.eval(-s) - 0.5);
            if odd.abs() > 1e-12 {
                return fail(format!("eta - 1/2 not odd at s={s} (residual {odd:e})"));
            }
            prev = v;
        }
        if self.eval(1.0) >= 1.0 {
            return fail("eta(1) must be < 1".into());
        }

        match self.decay {
            Decay::Exponential => {
                if self.eval(-40.0) >= 1e-12 || 1.0 - self.eval(40.0) >= 1e-12 {
                    return fail("tails not exponentially small at |s| = 40".into());
                }
            }
            Decay::Polynomial(rho) => {
                // eta(-t) t^{1+rho} has to stay bounded along a geometric sweep.
                let scaled = |t: f64| self.eval(-t) * t.powf(1.0 + rho);
                let base = scaled(1e2);
                for t in [1e3, 1e4, 1e5] {
                    if !(scaled(t) <= 2.0 * base + 1e-12) {
                        return fail(format!("tail decays slower than |s|^-(1+{rho})"));
                    }
                }
            }
        }

        let h = 0.01;
        for i in 1..2000 {
            let s = i as f64 * h;
            let second = self.eval(s + h) - 2.0 * self.eval(s) + self.eval(s - h);
            if second > 1e-10 {
                return fail(format!("not concave near s={s} (second difference {second:e})"));
            }
        }
        Ok(())
    }
}
