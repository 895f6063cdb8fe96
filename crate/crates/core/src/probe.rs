//! Sampled witnesses for the structural conditions on the coefficients.
//!
//! Nothing here proves anything: the report gives the largest ratios seen
//! over random pairs in a ball, which is a lower bound on the true constants.

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::JumpDiffusionProblem;
use crate::rng;
use crate::scalar::{all_finite, distance, dot, norm, Scalar};

/// Pairs closer than this are redrawn.
pub const MIN_PAIR_DISTANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzConstants<T> {
    /// Frobenius-norm ratio for `g`.
    pub diffusion: T,
    pub jump: T,
    /// `None` without a drift split.
    pub split_u: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionProbeReport<T> {
    /// Largest `⟨x−y, f(x)−f(y)⟩ / ‖x−y‖²`.
    pub one_sided_constant: T,
    pub lipschitz_constants: LipschitzConstants<T>,
    /// Least-squares slope of `ln(‖f(x)−f(y)‖/‖x−y‖)` against
    /// `ln(1 + max(‖x‖, ‖y‖))`, clamped at zero.
    pub growth_exponent_witness: T,
    /// Largest relative `‖u + v − f‖` over probe points, when split.
    pub split_mismatch: Option<T>,
    pub probe_count: usize,
    pub probe_radius: T,
    /// Pairs dropped because a coefficient was not finite at one of the points.
    pub excluded: usize,
}

fn uniform_in_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| rng::standard_normal(rng)).collect();
        let len = norm(&dir);
        if len == 0.0 {
            continue;
        }
        let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
        return dir.into_iter().map(|c| c * r / len).collect();
    }
}

struct Evaluations<T> {
    f: Vec<T>,
    g: Vec<T>,
    h: Vec<T>,
    u: Option<Vec<T>>,
    v: Option<Vec<T>>,
}

fn evaluate<T: Scalar>(problem: &JumpDiffusionProblem<T>, x: &[T]) -> Option<Evaluations<T>> {
    let d = problem.dim();
    let mut f = vec![T::zero(); d];
    let mut g = vec![T::zero(); d * problem.brownian_dim()];
    let mut h = vec![T::zero(); d];
    problem.drift_into(x, &mut f);
    problem.diffusion_into(x, &mut g);
    problem.jump_into(x, &mut h);
    let (u, v) = if problem.has_split() {
        let mut u = vec![T::zero(); d];
        let mut v = vec![T::zero(); d];
        problem.split_into(x, &mut u, &mut v);
        (Some(u), Some(v))
    } else {
        (None, None)
    };
    let finite = all_finite(&f)
        && all_finite(&g)
        && all_finite(&h)
        && u.as_deref().is_none_or(all_finite)
        && v.as_deref().is_none_or(all_finite);
    finite.then_some(Evaluations { f, g, h, u, v })
}

/// Draws `probe_count` pairs uniformly in the ball of `probe_radius` and
/// reports the empirical constants. Deterministic in `seed`.
pub fn probe_assumptions<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    probe_count: usize,
    probe_radius: T,
    seed: u64,
) -> Result<AssumptionProbeReport<T>> {
    if probe_count < 2 {
        return Err(Error::InvalidArgument(format!("probe_count must be at least 2, got {probe_count}")));
    }
    if !(probe_radius > T::zero()) || !probe_radius.is_finite() {
        return Err(Error::InvalidArgument(format!("probe_radius must be positive, got {probe_radius}")));
    }
    let d = problem.dim();
    let radius = probe_radius.as_f64();
    let mut rng = rng::stream_rng(seed, u64::MAX);

    let mut one_sided = T::neg_infinity();
    let (mut lip_g, mut lip_h) = (T::zero(), T::zero());
    let mut lip_u = problem.has_split().then(T::zero);
    let mut mismatch = problem.has_split().then(T::zero);
    let mut excluded = 0;
    let mut growth_points: Vec<(f64, f64)> = Vec::with_capacity(probe_count);

    for _ in 0..probe_count {
        let (x, y) = loop {
            let x: Vec<T> = uniform_in_ball(&mut rng, d, radius).into_iter().map(T::of).collect();
            let y: Vec<T> = uniform_in_ball(&mut rng, d, radius).into_iter().map(T::of).collect();
            if distance(&x, &y).as_f64() >= MIN_PAIR_DISTANCE {
                break (x, y);
            }
        };
        let (Some(ex), Some(ey)) = (evaluate(problem, &x), evaluate(problem, &y)) else {
            excluded += 1;
            continue;
        };
        let diff: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a - b).collect();
        let dist = norm(&diff);
        let df: Vec<T> = ex.f.iter().zip(&ey.f).map(|(&a, &b)| a - b).collect();
        one_sided = one_sided.max(dot(&diff, &df) / (dist * dist));
        lip_g = lip_g.max(distance(&ex.g, &ey.g) / dist);
        lip_h = lip_h.max(distance(&ex.h, &ey.h) / dist);
        if let (Some(l), Some(ux), Some(uy)) = (lip_u.as_mut(), &ex.u, &ey.u) {
            *l = l.max(distance(ux, uy) / dist);
        }
        if let Some(worst) = mismatch.as_mut() {
            for e in [&ex, &ey] {
                let (u, v) = (e.u.as_ref().expect("split"), e.v.as_ref().expect("split"));
                let gap: Vec<T> = u.iter().zip(v).zip(&e.f).map(|((&a, &b), &c)| a + b - c).collect();
                *worst = worst.max(norm(&gap) / (T::one() + norm(&e.f)));
            }
        }
        let ratio = (norm(&df) / dist).as_f64();
        if ratio > 0.0 {
            let scale = norm(&x).max(norm(&y)).as_f64();
            growth_points.push(((1.0 + scale).ln(), ratio.ln()));
        }
    }

    if excluded == probe_count {
        return Err(Error::DegenerateData("every probe pair had a non-finite coefficient value".into()));
    }

    Ok(AssumptionProbeReport {
        one_sided_constant: one_sided,
        lipschitz_constants: LipschitzConstants { diffusion: lip_g, jump: lip_h, split_u: lip_u },
        growth_exponent_witness: T::of(growth_slope(&growth_points)),
        split_mismatch: mismatch,
        probe_count,
        probe_radius,
        excluded,
    })
}

fn growth_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    // constant ratios give a zero-variance fit and a zero exponent
    if sxx <= f64::EPSILON * n || sxy.abs() <= 1e-12 * sxx.max(1.0) {
        return 0.0;
    }
    (sxy / sxx).max(0.0)
}
