//! Strong sup-norm error against a fine compensated-tamed reference.
//!
//! For every path index one noise path is sampled at `ref_steps`; the
//! reference is CTS on that grid. Each level coarsens the same noise, runs
//! the scheme under test, and compares its interpolant with the reference at
//! every fine grid point. Per level the estimate is `(mean sup^p)^{1/p}`.

use rayon::prelude::*;

use super::fit::fit_order;
use crate::error::{Error, Result};
use crate::interpolant::Interpolant;
use crate::noise::{coarsen, sample_noise};
use crate::problem::JumpDiffusionProblem;
use crate::scalar::{distance, Scalar};
use crate::schemes::{simulate, SchemeId};

/// Smallest admissible `ref_steps / max(levels)` for [`strong_error`].
pub const MIN_REFERENCE_FACTOR: usize = 8;

/// One path's sup-norm error at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample<T> {
    pub path_id: u64,
    pub sup_error: T,
    /// Only EM paths can diverge; their `sup_error` is `+∞`.
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow<T> {
    pub steps: usize,
    pub dt: T,
    pub error: T,
    pub std_err: T,
    /// Diverged paths left out of `error`.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    pub scheme: SchemeId,
    pub p: T,
    pub n_paths: usize,
    pub ref_steps: usize,
    /// Sorted by decreasing `dt`.
    pub rows: Vec<LevelRow<T>>,
    /// `None` when some level error is zero and no log-log fit exists.
    pub fitted_order: Option<T>,
    pub fitted_intercept: Option<T>,
    /// Largest drift increment norm over every step of every simulated path
    /// (test scheme and reference); below one for the tamed schemes.
    pub max_drift_increment: T,
}

impl<T: Scalar> ConvergenceReport<T> {
    pub fn degenerate(&self) -> bool {
        self.fitted_order.is_none()
    }

    pub fn excluded(&self) -> usize {
        self.rows.iter().map(|r| r.excluded).sum()
    }
}

/// Raw per-path sup errors for every level, before aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSampleSet<T> {
    pub scheme: SchemeId,
    pub ref_steps: usize,
    /// Ascending.
    pub levels: Vec<usize>,
    pub horizon: T,
    /// `samples[level][path_id]`.
    pub samples: Vec<Vec<ErrorSample<T>>>,
    pub max_drift_increment: T,
}

impl<T: Scalar> ErrorSampleSet<T> {
    pub fn n_paths(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Aggregates the samples into `(E sup^p)^{1/p}` per level with a
    /// delta-method standard error and fits the log-log slope.
    pub fn report(&self, p: T) -> Result<ConvergenceReport<T>> {
        check_p(p)?;
        let mut rows = Vec::with_capacity(self.levels.len());
        for (&steps, samples) in self.levels.iter().zip(&self.samples) {
            let kept: Vec<T> = samples.iter().filter(|s| !s.diverged).map(|s| s.sup_error).collect();
            let excluded = samples.len() - kept.len();
            if kept.is_empty() {
                return Err(Error::DegenerateData(format!("every path diverged at level {steps}")));
            }
            let (error, std_err) = power_mean(&kept, p);
            rows.push(LevelRow { steps, dt: self.horizon / T::of(steps as f64), error, std_err, excluded });
        }
        let fit = if rows.iter().all(|r| r.error > T::zero()) && rows.len() >= 2 {
            let pts: Vec<(T, T)> = rows.iter().map(|r| (r.dt, r.error)).collect();
            Some(fit_order(&pts)?)
        } else {
            None
        };
        Ok(ConvergenceReport {
            scheme: self.scheme,
            p,
            n_paths: self.n_paths(),
            ref_steps: self.ref_steps,
            rows,
            fitted_order: fit.map(|f| f.0),
            fitted_intercept: fit.map(|f| f.1),
            max_drift_increment: self.max_drift_increment,
        })
    }
}

fn check_p<T: Scalar>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be finite and at least 1, got {p}")));
    }
    Ok(())
}

/// `((1/n) Σ x^p)^{1/p}` and its delta-method standard error
/// `(1/p) m^{1/p − 1} s / √n`, `s` the sample deviation of `x^p`.
pub(crate) fn power_mean<T: Scalar>(values: &[T], p: T) -> (T, T) {
    let n = T::of(values.len() as f64);
    let powered: Vec<T> = values.iter().map(|&v| v.powf(p)).collect();
    let mean = powered.iter().fold(T::zero(), |a, &b| a + b) / n;
    let estimate = mean.powf(T::one() / p);
    if values.len() < 2 || mean == T::zero() {
        return (estimate, T::zero());
    }
    let var = powered.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / (n - T::one());
    let se = mean.powf(T::one() / p - T::one()) / p * var.sqrt() / n.sqrt();
    (estimate, se)
}

fn validate_levels(levels: &[usize], ref_steps: usize) -> Result<Vec<usize>> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &level in &sorted {
        if level == 0 || !ref_steps.is_multiple_of(level) {
            return Err(Error::InvalidArgument(format!("level {level} does not divide ref_steps {ref_steps}")));
        }
    }
    Ok(sorted)
}

struct PathOutcome<T> {
    sups: Vec<(T, bool)>,
    max_drift_increment: T,
}

fn one_path<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    levels: &[usize],
    ref_steps: usize,
    seed: u64,
    path_id: u64,
) -> Result<PathOutcome<T>> {
    let fine = sample_noise(problem, ref_steps, seed, path_id)?;
    let reference = simulate(problem, SchemeId::Cts, &fine).map_err(|e| match e {
        Error::NonFinite { step, .. } => Error::ReferenceDiverged { path_id, step },
        other => other,
    })?;
    let d = problem.dim();
    let mut max_inc = reference.max_drift_increment();
    let mut sups = Vec::with_capacity(levels.len());
    for &level in levels {
        let noise = coarsen(&fine, ref_steps / level)?;
        let path = simulate(problem, scheme, &noise)?;
        max_inc = max_inc.max(path.max_drift_increment());
        if path.diverged() {
            sups.push((T::infinity(), true));
            continue;
        }
        let mut sup = T::zero();
        Interpolant::new(problem, &path, &fine)?.for_each(|i, value| {
            let r = &reference.states()[i * d..(i + 1) * d];
            sup = sup.max(distance(r, value));
        })?;
        sups.push((sup, false));
    }
    Ok(PathOutcome { sups, max_drift_increment: max_inc })
}

/// Per-path sup errors for `levels` (each dividing `ref_steps`) over
/// `n_paths` coupled noise paths, run on the current rayon pool.
pub fn sample_errors<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    levels: &[usize],
    ref_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<ErrorSampleSet<T>> {
    let levels = validate_levels(levels, ref_steps)?;
    if n_paths < 2 {
        return Err(Error::InvalidArgument(format!("n_paths must be at least 2, got {n_paths}")));
    }
    if !scheme.applicable(problem) {
        return Err(Error::MissingSplit);
    }
    let outcomes: Vec<PathOutcome<T>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|id| one_path(problem, scheme, &levels, ref_steps, seed, id))
        .collect::<Result<_>>()?;

    let mut samples = vec![Vec::with_capacity(n_paths); levels.len()];
    let mut max_inc = T::zero();
    for (id, outcome) in outcomes.iter().enumerate() {
        max_inc = max_inc.max(outcome.max_drift_increment);
        for (slot, &(sup_error, diverged)) in samples.iter_mut().zip(&outcome.sups) {
            slot.push(ErrorSample { path_id: id as u64, sup_error, diverged });
        }
    }
    Ok(ErrorSampleSet { scheme, ref_steps, levels, horizon: problem.horizon(), samples, max_drift_increment: max_inc })
}

/// Strong error estimate `(E sup_t ‖X_t − χ_t‖^p)^{1/p}` per level plus the
/// fitted convergence order. Requires `ref_steps ≥ 8 · max(levels)`.
pub fn strong_error<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    levels: &[usize],
    ref_steps: usize,
    n_paths: usize,
    p: T,
    seed: u64,
) -> Result<ConvergenceReport<T>> {
    check_p(p)?;
    let sorted = validate_levels(levels, ref_steps)?;
    let finest = *sorted.last().expect("non-empty");
    if ref_steps < MIN_REFERENCE_FACTOR * finest {
        return Err(Error::InvalidArgument(format!(
            "ref_steps {ref_steps} must be at least {MIN_REFERENCE_FACTOR} times the finest level {finest}"
        )));
    }
    sample_errors(problem, scheme, &sorted, ref_steps, n_paths, seed)?.report(p)
}
