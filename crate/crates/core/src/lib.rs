//! Multivariate Stancu-type neural network operators.
//!
//! The operator of order `n` with perturbation parameters `0 <= alpha <= beta`
//! acts on a function `f` defined on a box `K = [a_1, b_1] x ... x [a_d, b_d]`:
//!
//! ```text
//!                   sum_k sigma(n s - k) f((k + alpha) / (n + beta))
//! F_n(f; s)  =  ----------------------------------------------------
//!                             sum_k sigma(n s - k)
//! ```
//!
//! where `k` ranges over the integer multi-indices with
//! `ceil(n a_i) <= k_i <= floor(n b_i)` and `sigma` is the tensor product of the
//! one-dimensional bump `sigma_eta(s) = (eta(s + 1) - eta(s - 1)) / 2` built
//! from a sigmoidal generator `eta`.
//!
//! Modules:
//! - [`kernel`]: sigmoidal generators, the activation kernel, discrete moments.
//! - [`operator`]: index sets, perturbed nodes, operator evaluation.
//! - [`analysis`]: error measurement, convergence series, modulus of continuity.
//! - [`signals`]: synthetic ECG, seeded noise, denoising and RMSE.
//! - [`cli`]: the `stancu-nno` command-line front end.
//!
//! Grid evaluation runs on rayon when the `parallel` feature (on by default)
//! is enabled. Results are bitwise identical to the sequential path.

pub mod analysis;
pub mod cli;
mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod operator;
mod par;
pub mod signals;
mod sum;

pub use error::{Error, Result};
pub use grid::Grid;
pub use kernel::{ActivationKernel, Decay, GeneratorKind, SigmoidalGenerator};
pub use operator::{
    DomainBox, Extension, FunctionSource, IndexSet, OperatorSpec, SampledValues, StancuParams,
};
pub use par::configure_threads;
pub use sum::CompensatedSum;
