use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{sample_noise, NoisePath};
use crate::problem::JumpDiffusionProblem;
use crate::scalar::{norm, Scalar};
use crate::schemes::{simulate, SchemeId};

pub const DIVERGENCE_SCHEMES: [SchemeId; 3] = [SchemeId::Em, SchemeId::Ncts, SchemeId::Cts];

/// Where the driving increments come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Sampled,
    /// All increments zero: the deterministic part of each scheme.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceRow<T> {
    pub scheme: SchemeId,
    pub steps: usize,
    pub dt: T,
    pub threshold: T,
    pub n_paths: usize,
    /// Fraction of paths with `max_n ‖Y_n‖ > threshold` (EM overflow included).
    pub fraction: T,
}

/// For every `dt` (which must divide the horizon) and each of EM, NCTS and
/// CTS, the fraction of paths leaving the ball of radius `threshold`.
pub fn divergence_demo<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    dt_values: &[T],
    n_paths: usize,
    threshold: T,
    seed: u64,
    noise: NoiseMode,
) -> Result<Vec<DivergenceRow<T>>> {
    if !(threshold > norm(problem.initial_state())) {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} must exceed the initial norm {}",
            norm(problem.initial_state())
        )));
    }
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be positive".into()));
    }
    let horizon = problem.horizon();
    let mut rows = Vec::with_capacity(dt_values.len() * DIVERGENCE_SCHEMES.len());
    for &dt in dt_values {
        let ratio = (horizon / dt).as_f64();
        let steps = ratio.round();
        if !(dt > T::zero()) || steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!("dt {dt} does not divide the horizon {horizon}")));
        }
        let steps = steps as usize;
        let exceed: Vec<[bool; 3]> = (0..n_paths as u64)
            .into_par_iter()
            .map(|id| -> Result<[bool; 3]> {
                let path_noise = match noise {
                    NoiseMode::Sampled => sample_noise(problem, steps, seed, id)?,
                    NoiseMode::Free => NoisePath::zeros(problem, steps)?,
                };
                let mut out = [false; 3];
                for (slot, scheme) in out.iter_mut().zip(DIVERGENCE_SCHEMES) {
                    let path = simulate(problem, scheme, &path_noise)?;
                    *slot = !(path.max_norm() <= threshold);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for (k, scheme) in DIVERGENCE_SCHEMES.into_iter().enumerate() {
            let count = exceed.iter().filter(|e| e[k]).count();
            rows.push(DivergenceRow {
                scheme,
                steps,
                dt,
                threshold,
                n_paths,
                fraction: T::of(count as f64 / n_paths as f64),
            });
        }
    }
    Ok(rows)
}
