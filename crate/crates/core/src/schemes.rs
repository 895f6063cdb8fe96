//! One-step methods and full-path simulation.
//!
//! With `τ = Δt`, every scheme advances as
//!
//! ```text
//! y' = y + drift_increment(y) + g(y) ΔW + h(y) J
//! ```
//!
//! | scheme | drift increment                              | jump `J`       |
//! |--------|----------------------------------------------|----------------|
//! | EM     | `Δt f(y)`                                    | `ΔN`           |
//! | NCTS   | `Δt f(y) / (1 + Δt‖f(y)‖)`                   | `ΔN`           |
//! | STS    | `Δt u(y) + Δt v(y) / (1 + Δt‖v(y)‖)`         | `ΔN`           |
//! | CTS    | `Δt f_λ(y) / (1 + Δt‖f_λ(y)‖)`               | `ΔN − λΔt`     |
//!
//! where `f_λ = f + λh`. The additions are performed in the order written,
//! so STS with `u ≡ 0` and CTS with `h ≡ 0` reproduce NCTS bit-for-bit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::{compensated_increment, NoisePath};
use crate::problem::JumpDiffusionProblem;
use crate::scalar::{all_finite, norm, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    /// Explicit Euler–Maruyama, the untamed baseline.
    Em,
    /// Non-compensated tamed scheme.
    Ncts,
    /// Semi-tamed scheme; tames only the `v` part of `f = u + v`.
    Sts,
    /// Compensated tamed scheme.
    Cts,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [SchemeId::Em, SchemeId::Ncts, SchemeId::Sts, SchemeId::Cts];
    pub const TAMED: [SchemeId; 3] = [SchemeId::Ncts, SchemeId::Sts, SchemeId::Cts];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Em => "EM",
            SchemeId::Ncts => "NCTS",
            SchemeId::Sts => "STS",
            SchemeId::Cts => "CTS",
        }
    }

    pub fn is_tamed(self) -> bool {
        self != SchemeId::Em
    }

    /// STS needs a drift split; everything else runs on any problem.
    pub fn applicable<T: Scalar>(self, problem: &JumpDiffusionProblem<T>) -> bool {
        self != SchemeId::Sts || problem.has_split()
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EM" => Ok(SchemeId::Em),
            "NCTS" => Ok(SchemeId::Ncts),
            "STS" => Ok(SchemeId::Sts),
            "CTS" => Ok(SchemeId::Cts),
            _ => Err(Error::InvalidArgument(format!("unknown scheme {s:?} (expected EM, NCTS, STS or CTS)"))),
        }
    }
}

/// `dt·fx / (1 + dt‖fx‖)`; its norm is always below one.
pub fn tamed_drift<T: Scalar>(fx: &[T], dt: T) -> Result<Vec<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !all_finite(fx) {
        return Err(Error::NonFiniteDrift { value: format!("{fx:?}"), state: "<unknown>".into() });
    }
    let mut out = fx.to_vec();
    let den = T::one() + dt * norm(fx);
    tame_into(&mut out, dt, den);
    Ok(out)
}

/// In place: `v ← (τ·v) / den`.
#[inline]
pub(crate) fn tame_into<T: Scalar>(v: &mut [T], tau: T, den: T) {
    for x in v.iter_mut() {
        *x = (tau * *x) / den;
    }
}

/// Scheme output on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath<T> {
    scheme: SchemeId,
    steps: usize,
    dim: usize,
    dt: T,
    /// Row-major `(steps + 1) × dim`.
    states: Vec<T>,
    max_drift_increment: T,
    diverged_at: Option<usize>,
}

impl<T: Scalar> DiscretePath<T> {
    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn states(&self) -> &[T] {
        &self.states
    }

    /// `Y_n`.
    pub fn state(&self, n: usize) -> &[T] {
        &self.states[n * self.dim..(n + 1) * self.dim]
    }

    /// Largest drift-increment norm over all steps taken. For NCTS and CTS
    /// this is the tamed increment, for STS the tamed `v` part, for EM the
    /// raw `Δt‖f‖`.
    pub fn max_drift_increment(&self) -> T {
        self.max_drift_increment
    }

    /// Index of the first non-finite state of an EM path. Every row from
    /// there on holds `+∞`.
    pub fn diverged_at(&self) -> Option<usize> {
        self.diverged_at
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// `max_n ‖Y_n‖`, infinite for a diverged path.
    pub fn max_norm(&self) -> T {
        if self.diverged() {
            return T::infinity();
        }
        self.states.chunks_exact(self.dim).map(norm).fold(T::zero(), T::max)
    }
}

/// Scratch buffers for repeated coefficient evaluation at one state.
pub(crate) struct Workspace<T> {
    pub drift: Vec<T>,
    pub split_u: Vec<T>,
    pub jump: Vec<T>,
    pub diffusion: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub fn new(problem: &JumpDiffusionProblem<T>) -> Self {
        let d = problem.dim();
        Self {
            drift: vec![T::zero(); d],
            split_u: vec![T::zero(); d],
            jump: vec![T::zero(); d],
            diffusion: vec![T::zero(); d * problem.brownian_dim()],
        }
    }
}

/// Evaluates every coefficient `scheme` needs at the left grid point `y`.
///
/// Afterwards `ws.drift` holds the drift rate that gets tamed (`f`, `v` or
/// `f_λ`), `ws.split_u` holds `u` (STS only), `ws.jump` holds `h` and
/// `ws.diffusion` holds `g`. Returns the norm entering the taming
/// denominator (EM ignores it).
pub(crate) fn freeze<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    y: &[T],
    ws: &mut Workspace<T>,
) -> Result<T> {
    match scheme {
        SchemeId::Em | SchemeId::Ncts => {
            problem.drift_into(y, &mut ws.drift);
            problem.jump_into(y, &mut ws.jump);
        }
        SchemeId::Sts => {
            if !problem.split_into(y, &mut ws.split_u, &mut ws.drift) {
                return Err(Error::MissingSplit);
            }
            problem.jump_into(y, &mut ws.jump);
        }
        SchemeId::Cts => problem.f_lambda_into(y, &mut ws.drift, &mut ws.jump),
    }
    problem.diffusion_into(y, &mut ws.diffusion);
    Ok(norm(&ws.drift))
}

/// Writes `y + drift_increment + g·dw + h·jump` into `out`, where `ws`
/// has been filled by [`freeze`] at `y`. `tau` is the elapsed time
/// in the step and `dt` the step size in the taming denominator. Returns the
/// norm of the (tamed part of the) drift increment.
#[allow(clippy::too_many_arguments)]
pub(crate) fn combine<T: Scalar>(
    scheme: SchemeId,
    y: &[T],
    ws: &Workspace<T>,
    rate_norm: T,
    tau: T,
    dt: T,
    dw: &[T],
    jump: T,
    out: &mut [T],
) -> T {
    let m = dw.len();
    let den = T::one() + dt * rate_norm;
    let mut tamed_sq = T::zero();
    for (i, o) in out.iter_mut().enumerate() {
        let rate = ws.drift[i];
        let drift_inc = match scheme {
            SchemeId::Em => tau * rate,
            SchemeId::Ncts | SchemeId::Cts => (tau * rate) / den,
            SchemeId::Sts => ws.split_u[i] * tau + (tau * rate) / den,
        };
        let tamed_part = match scheme {
            SchemeId::Sts => (tau * rate) / den,
            _ => drift_inc,
        };
        tamed_sq = tamed_sq + tamed_part * tamed_part;
        let mut noise = T::zero();
        for (j, &w) in dw.iter().enumerate() {
            noise = noise + ws.diffusion[i * m + j] * w;
        }
        *o = ((y[i] + drift_inc) + noise) + ws.jump[i] * jump;
    }
    tamed_sq.sqrt()
}

fn check_step_inputs<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    y: &[T],
    dw: &[T],
    dt: T,
) -> Result<()> {
    problem.check_point(y)?;
    if dw.len() != problem.brownian_dim() {
        return Err(Error::DimensionMismatch {
            what: "brownian increment",
            expected: problem.brownian_dim(),
            got: dw.len(),
        });
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be finite and positive, got {dt}")));
    }
    if !scheme.applicable(problem) {
        return Err(Error::MissingSplit);
    }
    Ok(())
}

/// Advances `y` by one step of `scheme`.
///
/// A non-finite result is an error for every scheme; [`simulate`] turns it
/// into a flagged path for EM.
pub fn step<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    y: &[T],
    dw: &[T],
    dn: u64,
    dt: T,
) -> Result<Vec<T>> {
    check_step_inputs(problem, scheme, y, dw, dt)?;
    let mut ws = Workspace::new(problem);
    let mut out = vec![T::zero(); problem.dim()];
    advance(problem, scheme, y, dw, dn, dt, &mut ws, &mut out).map_err(|e| with_step(e, 0))?;
    Ok(out)
}

fn with_step(e: Error, n: usize) -> Error {
    match e {
        Error::NonFinite { scheme, state, .. } => Error::NonFinite { scheme, step: n, state },
        other => other,
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn advance<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    y: &[T],
    dw: &[T],
    dn: u64,
    dt: T,
    ws: &mut Workspace<T>,
    out: &mut [T],
) -> Result<T> {
    let rate_norm = freeze(problem, scheme, y, ws)?;
    if scheme.is_tamed() && !rate_norm.is_finite() {
        return Err(Error::NonFinite { scheme, step: 0, state: format!("{y:?}") });
    }
    let jump = match scheme {
        SchemeId::Cts => compensated_increment(dn, problem.intensity(), dt),
        _ => T::of(dn as f64),
    };
    let inc = combine(scheme, y, ws, rate_norm, dt, dt, dw, jump, out);
    if !all_finite(out) {
        return Err(Error::NonFinite { scheme, step: 0, state: format!("{y:?}") });
    }
    Ok(if scheme == SchemeId::Em { dt * rate_norm } else { inc })
}

/// Iterates `scheme` over every row of `noise`, starting from the initial state.
pub fn simulate<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    scheme: SchemeId,
    noise: &NoisePath<T>,
) -> Result<DiscretePath<T>> {
    if noise.intensity() != problem.intensity() {
        return Err(Error::InvalidArgument(format!(
            "noise intensity {} differs from problem intensity {}",
            noise.intensity(),
            problem.intensity()
        )));
    }
    let horizon = problem.horizon().as_f64();
    if (noise.horizon().as_f64() - horizon).abs() > 1e-9 * horizon.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "noise horizon {} differs from problem horizon {horizon}",
            noise.horizon()
        )));
    }
    if noise.brownian_dim() != problem.brownian_dim() {
        return Err(Error::DimensionMismatch {
            what: "noise brownian dimension",
            expected: problem.brownian_dim(),
            got: noise.brownian_dim(),
        });
    }
    if !scheme.applicable(problem) {
        return Err(Error::MissingSplit);
    }

    let d = problem.dim();
    let steps = noise.steps();
    let dt = noise.dt();
    let mut states = vec![T::zero(); (steps + 1) * d];
    states[..d].copy_from_slice(problem.initial_state());
    let mut ws = Workspace::new(problem);
    let mut max_inc = T::zero();
    let mut diverged_at = None;
    for n in 0..steps {
        let (done, rest) = states.split_at_mut((n + 1) * d);
        let y = &done[n * d..];
        let out = &mut rest[..d];
        match advance(problem, scheme, y, noise.brownian_row(n), noise.poisson_at(n), dt, &mut ws, out) {
            Ok(inc) => max_inc = max_inc.max(inc),
            Err(Error::NonFinite { .. }) if scheme == SchemeId::Em => {
                diverged_at = Some(n + 1);
                rest.fill(T::infinity());
                break;
            }
            Err(e) => return Err(with_step(e, n)),
        }
    }
    Ok(DiscretePath { scheme, steps, dim: d, dt, states, max_drift_increment: max_inc, diverged_at })
}
