use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::sample_noise;
use crate::problem::JumpDiffusionProblem;
use crate::scalar::{norm, Scalar};
use crate::schemes::{simulate, SchemeId};

/// Paths simulated per parallel batch; fixed so the summation order never
/// depends on the pool size.
const BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrack<T> {
    pub scheme: SchemeId,
    pub steps: usize,
    pub q: T,
    /// `max_n` of the empirical `E‖Y_n‖^q`.
    pub sup_moment: T,
    /// Empirical `E‖Y_n‖^q` for `n = 0..=steps`.
    pub series: Vec<T>,
    /// Diverged EM paths left out of the averages.
    pub excluded: usize,
}

/// Empirical `q`-th moments of `‖Y_n‖` over `n_paths` independent paths.
pub fn moment_track<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    steps: usize,
    n_paths: usize,
    q: T,
    seed: u64,
) -> Result<MomentTrack<T>> {
    if !(q >= T::one()) || !q.is_finite() {
        return Err(Error::InvalidArgument(format!("q must be finite and at least 1, got {q}")));
    }
    if n_paths == 0 || steps == 0 {
        return Err(Error::InvalidArgument("steps and n_paths must be positive".into()));
    }
    let mut sums = vec![T::zero(); steps + 1];
    let mut kept = 0usize;
    for start in (0..n_paths).step_by(BATCH) {
        let end = (start + BATCH).min(n_paths);
        let batch: Vec<Option<Vec<T>>> = (start as u64..end as u64)
            .into_par_iter()
            .map(|id| -> Result<Option<Vec<T>>> {
                let noise = sample_noise(problem, steps, seed, id)?;
                let path = simulate(problem, scheme, &noise)?;
                if path.diverged() {
                    return Ok(None);
                }
                Ok(Some(path.states().chunks_exact(path.dim()).map(|y| norm(y).powf(q)).collect()))
            })
            .collect::<Result<_>>()?;
        for series in batch.into_iter().flatten() {
            kept += 1;
            for (s, v) in sums.iter_mut().zip(series) {
                *s = *s + v;
            }
        }
    }
    if kept == 0 {
        return Err(Error::DegenerateData("every path diverged".into()));
    }
    let n = T::of(kept as f64);
    let series: Vec<T> = sums.into_iter().map(|s| s / n).collect();
    let sup_moment = series.iter().copied().fold(T::zero(), T::max);
    Ok(MomentTrack { scheme, steps, q, sup_moment, series, excluded: n_paths - kept })
}
