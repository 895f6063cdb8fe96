//! Continuous-time extension of a discrete path, evaluated on a finer grid.
//!
//! For `t ∈ [nΔt, (n+1)Δt)` and `τ = t − nΔt` the interpolant is the scheme
//! step with `Δt` replaced by `τ` in the drift numerator (the taming
//! denominator keeps `Δt`) and the increments replaced by
//! `W_t − W_{nΔt}` and `N_t − N_{nΔt}` (compensated for CTS). At grid
//! times it returns the stored state itself.

use crate::error::{Error, Result};
use crate::noise::{compensated_increment, cumulative, CumulativeNoise, NoisePath};
use crate::problem::JumpDiffusionProblem;
use crate::scalar::Scalar;
use crate::schemes::{combine, freeze, DiscretePath, SchemeId, Workspace};

/// A coarse discrete path paired with the fine noise that refines it.
pub struct Interpolant<'a, T: Scalar> {
    problem: &'a JumpDiffusionProblem<T>,
    path: &'a DiscretePath<T>,
    fine: &'a NoisePath<T>,
    factor: usize,
    table: CumulativeNoise<T>,
}

fn refinement_factor<T: Scalar>(path: &DiscretePath<T>, fine: &NoisePath<T>) -> Result<usize> {
    if path.steps() == 0 || !fine.steps().is_multiple_of(path.steps()) {
        return Err(Error::InvalidArgument(format!(
            "fine grid of {} steps does not refine the coarse grid of {} steps",
            fine.steps(),
            path.steps()
        )));
    }
    let factor = fine.steps() / path.steps();
    let coarse_dt = path.dt().as_f64();
    let implied = fine.dt().as_f64() * factor as f64;
    if (implied - coarse_dt).abs() > 1e-9 * coarse_dt {
        return Err(Error::InvalidArgument(format!(
            "fine step {} times {factor} does not match coarse step {coarse_dt}",
            fine.dt()
        )));
    }
    Ok(factor)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_inside<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    y: &[T],
    ws: &Workspace<T>,
    rate_norm: T,
    coarse_dt: T,
    tau: T,
    dw: &[T],
    dn: u64,
    out: &mut [T],
) {
    let jump = match scheme {
        SchemeId::Cts => compensated_increment(dn, problem.intensity(), tau),
        _ => T::of(dn as f64),
    };
    combine(scheme, y, ws, rate_norm, tau, coarse_dt, dw, jump, out);
}

impl<'a, T: Scalar> Interpolant<'a, T> {
    pub fn new(
        problem: &'a JumpDiffusionProblem<T>,
        path: &'a DiscretePath<T>,
        fine: &'a NoisePath<T>,
    ) -> Result<Self> {
        let factor = refinement_factor(path, fine)?;
        Ok(Self { problem, path, fine, factor, table: fine.cumulative_table() })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    /// Value at fine grid index `fine_index`.
    pub fn at(&self, fine_index: usize) -> Result<Vec<T>> {
        if fine_index > self.fine.steps() {
            return Err(Error::InvalidArgument(format!("fine index {fine_index} outside 0..={}", self.fine.steps())));
        }
        let (n, r) = (fine_index / self.factor, fine_index % self.factor);
        if r == 0 {
            return Ok(self.path.state(n).to_vec());
        }
        let mut ws = Workspace::new(self.problem);
        let y = self.path.state(n);
        let rate_norm = freeze(self.problem, self.path.scheme(), y, &mut ws)?;
        let node = n * self.factor;
        let dw: Vec<T> =
            self.table.brownian(fine_index).iter().zip(self.table.brownian(node)).map(|(&a, &b)| a - b).collect();
        let dn = self.table.poisson(fine_index) - self.table.poisson(node);
        let tau = T::of(r as f64) * self.fine.dt();
        let mut out = vec![T::zero(); self.problem.dim()];
        evaluate_inside(self.problem, self.path.scheme(), y, &ws, rate_norm, self.path.dt(), tau, &dw, dn, &mut out);
        Ok(out)
    }

    /// Calls `visit(fine_index, value)` for every fine index in ascending
    /// order, evaluating the coefficients once per coarse step.
    pub fn for_each(&self, mut visit: impl FnMut(usize, &[T])) -> Result<()> {
        let d = self.problem.dim();
        let m = self.problem.brownian_dim();
        let scheme = self.path.scheme();
        let mut ws = Workspace::new(self.problem);
        let mut out = vec![T::zero(); d];
        let mut dw = vec![T::zero(); m];
        for n in 0..self.path.steps() {
            let y = self.path.state(n);
            let node = n * self.factor;
            visit(node, y);
            if self.factor == 1 {
                continue;
            }
            let rate_norm = freeze(self.problem, scheme, y, &mut ws)?;
            let (w0, n0) = (self.table.brownian(node), self.table.poisson(node));
            for r in 1..self.factor {
                let i = node + r;
                for ((slot, &a), &b) in dw.iter_mut().zip(self.table.brownian(i)).zip(w0) {
                    *slot = a - b;
                }
                let dn = self.table.poisson(i) - n0;
                let tau = T::of(r as f64) * self.fine.dt();
                evaluate_inside(self.problem, scheme, y, &ws, rate_norm, self.path.dt(), tau, &dw, dn, &mut out);
                visit(i, &out);
            }
        }
        visit(self.fine.steps(), self.path.state(self.path.steps()));
        Ok(())
    }
}

/// Value of the interpolant of `coarse_path` at fine grid index `fine_index`,
/// reading `W_t`, `N_t` through [`cumulative`].
pub fn interpolate<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    coarse_path: &DiscretePath<T>,
    fine_noise: &NoisePath<T>,
    fine_index: usize,
) -> Result<Vec<T>> {
    if coarse_path.scheme() != scheme {
        return Err(Error::InvalidArgument(format!("path was produced by {}, not {scheme}", coarse_path.scheme())));
    }
    let factor = refinement_factor(coarse_path, fine_noise)?;
    if fine_index > fine_noise.steps() {
        return Err(Error::InvalidArgument(format!("fine index {fine_index} outside 0..={}", fine_noise.steps())));
    }
    let (n, r) = (fine_index / factor, fine_index % factor);
    if r == 0 {
        return Ok(coarse_path.state(n).to_vec());
    }
    let y = coarse_path.state(n);
    let mut ws = Workspace::new(problem);
    let rate_norm = freeze(problem, scheme, y, &mut ws)?;
    let (w_t, n_t) = cumulative(fine_noise, fine_index)?;
    let (w_0, n_0) = cumulative(fine_noise, n * factor)?;
    let dw: Vec<T> = w_t.iter().zip(&w_0).map(|(&a, &b)| a - b).collect();
    let tau = T::of(r as f64) * fine_noise.dt();
    let mut out = vec![T::zero(); problem.dim()];
    evaluate_inside(problem, scheme, y, &ws, rate_norm, coarse_path.dt(), tau, &dw, n_t - n_0, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{coarsen, sample_noise};
    use crate::problem::{catalog, zero_field};
    use crate::schemes::simulate;

    #[test]
    fn nodes_return_stored_states() {
        let p = catalog::cubic::<f64>();
        let fine = sample_noise(&p, 64, 2, 3).unwrap();
        let coarse = coarsen(&fine, 8).unwrap();
        for scheme in SchemeId::ALL {
            let path = simulate(&p, scheme, &coarse).unwrap();
            for n in 0..=8 {
                let v = interpolate(&p, scheme, &path, &fine, n * 8).unwrap();
                assert_eq!(v.as_slice(), path.state(n));
            }
        }
    }

    #[test]
    fn noise_free_ncts_is_linear_in_time() {
        let p = catalog::cubic::<f64>();
        let fine = NoisePath::zeros(&p, 16).unwrap();
        let coarse = coarsen(&fine, 4).unwrap();
        let path = simulate(&p, SchemeId::Ncts, &coarse).unwrap();
        let y = path.state(1)[0];
        let f = -4.0 * y - y * y * y;
        let dt = 0.25;
        for r in 1..4 {
            let tau = r as f64 / 16.0;
            let expected = y + tau * f / (1.0 + dt * f.abs());
            let v = interpolate(&p, SchemeId::Ncts, &path, &fine, 4 + r).unwrap();
            assert!((v[0] - expected).abs() < 1e-15, "{} vs {expected}", v[0]);
        }
    }

    #[test]
    fn cts_without_jump_coefficient_interpolates_like_ncts() {
        let p = catalog::cubic::<f64>().with_jump_coeff(zero_field());
        let fine = sample_noise(&p, 64, 4, 4).unwrap();
        let coarse = coarsen(&fine, 16).unwrap();
        let cts = simulate(&p, SchemeId::Cts, &coarse).unwrap();
        let ncts = simulate(&p, SchemeId::Ncts, &coarse).unwrap();
        for i in 0..=64 {
            assert_eq!(
                interpolate(&p, SchemeId::Cts, &cts, &fine, i).unwrap(),
                interpolate(&p, SchemeId::Ncts, &ncts, &fine, i).unwrap()
            );
        }
    }

    #[test]
    fn bulk_evaluation_matches_pointwise() {
        let p = catalog::cubic::<f64>();
        let fine = sample_noise(&p, 96, 8, 1).unwrap();
        let coarse = coarsen(&fine, 12).unwrap();
        for scheme in SchemeId::ALL {
            let path = simulate(&p, scheme, &coarse).unwrap();
            let interp = Interpolant::new(&p, &path, &fine).unwrap();
            let mut seen = 0;
            interp
                .for_each(|i, v| {
                    assert_eq!(i, seen);
                    seen += 1;
                    let point = interpolate(&p, scheme, &path, &fine, i).unwrap();
                    assert_eq!(v, point.as_slice());
                    assert_eq!(interp.at(i).unwrap(), point);
                })
                .unwrap();
            assert_eq!(seen, 97);
        }
    }

    #[test]
    fn end_of_step_is_close_to_next_state() {
        let p = catalog::cubic::<f64>();
        let fine = sample_noise(&p, 256, 1, 9).unwrap();
        let coarse = coarsen(&fine, 256).unwrap();
        let path = simulate(&p, SchemeId::Cts, &coarse).unwrap();
        let limit = interpolate(&p, SchemeId::Cts, &path, &fine, 255).unwrap();
        // one fine step before the node; continuity up to a fine increment
        assert!((limit[0] - path.state(1)[0]).abs() < 0.5);
    }

    #[test]
    fn refinement_mismatch_is_rejected() {
        let p = catalog::cubic::<f64>();
        let fine = sample_noise(&p, 60, 1, 1).unwrap();
        let other = sample_noise(&p, 8, 1, 1).unwrap();
        let path = simulate(&p, SchemeId::Cts, &other).unwrap();
        assert!(interpolate(&p, SchemeId::Cts, &path, &fine, 3).is_err());
        assert!(interpolate(&p, SchemeId::Ncts, &path, &fine, 0).is_err());
        let fine = sample_noise(&p, 64, 1, 1).unwrap();
        assert!(interpolate(&p, SchemeId::Cts, &path, &fine, 65).is_err());
    }
}
