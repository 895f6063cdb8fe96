//! Explicit tamed Euler schemes for jump-diffusion SDEs
//!
//! ```text
//! dX(t) = f(X(t⁻)) dt + g(X(t⁻)) dW(t) + h(X(t⁻)) dN(t)
//! ```
//!
//! with a one-sided Lipschitz, superlinearly growing drift `f`, plus the
//! Monte Carlo machinery to measure their strong convergence order.
//!
//! * [`problem`]: coefficients, the `f = u + v` split, `f_λ = f + λh` and a
//!   small catalog of test problems; [`probe`] samples the structural
//!   constants.
//! * [`noise`]: reproducible Brownian/Poisson increments with exact
//!   coarsening, so all step sizes share one realization.
//! * [`schemes`]: Euler–Maruyama, NCTS, STS and CTS steps and paths;
//!   [`interpolant`] extends a path to a finer grid.
//! * [`analysis`]: strong error and order fits, moment tracking, the Euler
//!   divergence comparison and CSV output.
//! * [`cli`]: the `jumptame` experiment runner.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod interpolant;
pub mod noise;
pub mod probe;
pub mod problem;
pub mod rng;
pub mod scalar;
pub mod schemes;

pub use error::{Error, Result};
pub use interpolant::{interpolate, Interpolant};
pub use noise::{coarsen, compensated_increment, cumulative, sample_noise, NoisePath};
pub use probe::{probe_assumptions, AssumptionProbeReport};
pub use problem::{catalog, JumpDiffusionProblem};
pub use scalar::Scalar;
pub use schemes::{simulate, step, tamed_drift, DiscretePath, SchemeId};

pub type Problem = JumpDiffusionProblem<f64>;
pub type Noise = NoisePath<f64>;
pub type Path = DiscretePath<f64>;
pub type Report = analysis::ConvergenceReport<f64>;
pub type ProbeReport = AssumptionProbeReport<f64>;

pub type Problem32 = JumpDiffusionProblem<f32>;
pub type Noise32 = NoisePath<f32>;
pub type Path32 = DiscretePath<f32>;
