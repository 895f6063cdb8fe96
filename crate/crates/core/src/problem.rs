//! Jump-diffusion problem data and the built-in problem catalog.
//!
//! A problem is `dX = f(X⁻) dt + g(X⁻) dW + h(X⁻) dN` on `[0, T]` with a
//! scalar Poisson process `N` of rate `λ` and a deterministic `X(0)`.
//! Coefficients are plain callables writing into caller-owned buffers; they
//! must be pure and safe to call from several threads at once.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar};

/// `R^d → R^d` coefficient (`f`, `u`, `v` or `h`), written into `out`.
pub type VectorField<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;

/// `R^d → R^{d×m}` diffusion coefficient, written row-major into `out`.
pub type MatrixField<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;

/// Tolerance for `u + v = f` relative to `1 + ‖f(x)‖`.
pub const SPLIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone)]
pub struct JumpDiffusionProblem<T: Scalar> {
    name: String,
    dim: usize,
    brownian_dim: usize,
    drift: VectorField<T>,
    drift_split: Option<(VectorField<T>, VectorField<T>)>,
    diffusion: MatrixField<T>,
    jump_coeff: VectorField<T>,
    intensity: T,
    initial_state: Vec<T>,
    horizon: T,
}

impl<T: Scalar> fmt::Debug for JumpDiffusionProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JumpDiffusionProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("brownian_dim", &self.brownian_dim)
            .field("split", &self.drift_split.is_some())
            .field("intensity", &self.intensity)
            .field("initial_state", &self.initial_state)
            .field("horizon", &self.horizon)
            .finish()
    }
}

impl<T: Scalar> JumpDiffusionProblem<T> {
    /// Builds a problem, checking the scalar parameters and the initial state.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        brownian_dim: usize,
        drift: VectorField<T>,
        diffusion: MatrixField<T>,
        jump_coeff: VectorField<T>,
        intensity: T,
        initial_state: Vec<T>,
        horizon: T,
    ) -> Result<Self> {
        let dim = initial_state.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("state dimension must be at least 1".into()));
        }
        if brownian_dim == 0 {
            return Err(Error::InvalidArgument("brownian dimension must be at least 1".into()));
        }
        check_intensity(intensity)?;
        check_horizon(horizon)?;
        Ok(Self {
            name: name.into(),
            dim,
            brownian_dim,
            drift,
            drift_split: None,
            diffusion,
            jump_coeff,
            intensity,
            initial_state,
            horizon,
        })
    }

    /// Attaches the split `f = u + v` (`u` globally Lipschitz, `v` one-sided
    /// Lipschitz). The split is checked at the initial state and a few points
    /// around it; [`probe_assumptions`](crate::probe::probe_assumptions)
    /// checks it over a whole ball.
    pub fn with_split(mut self, u: VectorField<T>, v: VectorField<T>) -> Result<Self> {
        self.drift_split = Some((u, v));
        let mut points = vec![self.initial_state.clone(), vec![T::zero(); self.dim]];
        for scale in [-2.0, -0.5, 0.5, 2.0] {
            points.push(self.initial_state.iter().map(|&x| x * T::of(scale) + T::of(scale)).collect());
        }
        for x in &points {
            let mismatch = self.split_mismatch(x).expect("split present");
            if mismatch > T::of(SPLIT_TOLERANCE) {
                self.drift_split = None;
                return Err(Error::InvalidArgument(format!(
                    "drift split u + v differs from f by {mismatch:e} at {x:?}"
                )));
            }
        }
        Ok(self)
    }

    pub fn without_split(mut self) -> Self {
        self.drift_split = None;
        self
    }

    pub fn with_drift(mut self, drift: VectorField<T>) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_jump_coeff(mut self, jump_coeff: VectorField<T>) -> Self {
        self.jump_coeff = jump_coeff;
        self
    }

    pub fn with_diffusion(mut self, diffusion: MatrixField<T>) -> Self {
        self.diffusion = diffusion;
        self
    }

    pub fn with_intensity(mut self, intensity: T) -> Result<Self> {
        check_intensity(intensity)?;
        self.intensity = intensity;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: T) -> Result<Self> {
        check_horizon(horizon)?;
        self.horizon = horizon;
        Ok(self)
    }

    pub fn with_initial_state(mut self, initial_state: Vec<T>) -> Result<Self> {
        if initial_state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "initial state",
                expected: self.dim,
                got: initial_state.len(),
            });
        }
        self.initial_state = initial_state;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn brownian_dim(&self) -> usize {
        self.brownian_dim
    }

    pub fn intensity(&self) -> T {
        self.intensity
    }

    pub fn initial_state(&self) -> &[T] {
        &self.initial_state
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn has_split(&self) -> bool {
        self.drift_split.is_some()
    }

    pub fn drift_into(&self, x: &[T], out: &mut [T]) {
        (self.drift)(x, out)
    }

    pub fn diffusion_into(&self, x: &[T], out: &mut [T]) {
        (self.diffusion)(x, out)
    }

    pub fn jump_into(&self, x: &[T], out: &mut [T]) {
        (self.jump_coeff)(x, out)
    }

    /// Evaluates `(u(x), v(x))` into the two buffers; `false` when no split is set.
    pub fn split_into(&self, x: &[T], u_out: &mut [T], v_out: &mut [T]) -> bool {
        match &self.drift_split {
            Some((u, v)) => {
                u(x, u_out);
                v(x, v_out);
                true
            }
            None => false,
        }
    }

    pub fn drift(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = vec![T::zero(); self.dim];
        self.drift_into(x, &mut out);
        Ok(out)
    }

    pub fn jump(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = vec![T::zero(); self.dim];
        self.jump_into(x, &mut out);
        Ok(out)
    }

    /// `g(x)` as a row-major `d × m` matrix.
    pub fn diffusion(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = vec![T::zero(); self.dim * self.brownian_dim];
        self.diffusion_into(x, &mut out);
        Ok(out)
    }

    /// Compensated drift `f(x) + λ h(x)`.
    pub fn f_lambda(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = vec![T::zero(); self.dim];
        let mut h = vec![T::zero(); self.dim];
        self.f_lambda_into(x, &mut out, &mut h);
        Ok(out)
    }

    /// Buffer form of [`f_lambda`](Self::f_lambda); `h_out` receives `h(x)`.
    pub fn f_lambda_into(&self, x: &[T], out: &mut [T], h_out: &mut [T]) {
        self.drift_into(x, out);
        self.jump_into(x, h_out);
        for (o, &h) in out.iter_mut().zip(h_out.iter()) {
            *o = *o + self.intensity * h;
        }
    }

    /// `‖u(x) + v(x) − f(x)‖ / (1 + ‖f(x)‖)`, or `None` without a split.
    pub fn split_mismatch(&self, x: &[T]) -> Option<T> {
        let (u, v) = self.drift_split.as_ref()?;
        let mut fu = vec![T::zero(); self.dim];
        let mut fv = vec![T::zero(); self.dim];
        let mut f = vec![T::zero(); self.dim];
        u(x, &mut fu);
        v(x, &mut fv);
        self.drift_into(x, &mut f);
        let diff: Vec<T> = fu.iter().zip(&fv).zip(&f).map(|((&a, &b), &c)| a + b - c).collect();
        Some(norm(&diff) / (T::one() + norm(&f)))
    }

    pub(crate) fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { what: "state", expected: self.dim, got: x.len() });
        }
        Ok(())
    }
}

fn check_intensity<T: Scalar>(intensity: T) -> Result<()> {
    if !(intensity >= T::zero()) || !intensity.is_finite() {
        return Err(Error::InvalidArgument(format!("intensity must be finite and non-negative, got {intensity}")));
    }
    Ok(())
}

fn check_horizon<T: Scalar>(horizon: T) -> Result<()> {
    if !(horizon > T::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon must be finite and positive, got {horizon}")));
    }
    Ok(())
}

/// Wraps a scalar map `R → R` as a one-dimensional [`VectorField`].
pub fn scalar_field<T: Scalar>(f: impl Fn(T) -> T + Send + Sync + 'static) -> VectorField<T> {
    Arc::new(move |x: &[T], out: &mut [T]| out[0] = f(x[0]))
}

pub fn zero_field<T: Scalar>() -> VectorField<T> {
    Arc::new(|_: &[T], out: &mut [T]| out.fill(T::zero()))
}

/// Built-in problems addressable by key.
pub mod catalog {
    use super::*;

    pub const KEYS: &[&str] = &["cubic", "linear", "linear-jump", "zero"];

    pub fn get<T: Scalar>(key: &str) -> Option<JumpDiffusionProblem<T>> {
        match key {
            "cubic" => Some(cubic()),
            "linear" => Some(linear(-1.0)),
            "linear-jump" => Some(linear_jump(-1.0, 0.5, 0.5, 1.0)),
            "zero" => Some(zero()),
            _ => None,
        }
    }

    /// `dX = (−4X − X³) dt + X dW + X dN`, `X(0) = 1`, `λ = 1`, `T = 1`,
    /// split as `u(x) = −4x`, `v(x) = −x³`.
    pub fn cubic<T: Scalar>() -> JumpDiffusionProblem<T> {
        let four = T::of(4.0);
        JumpDiffusionProblem::new(
            "cubic",
            1,
            scalar_field(move |x: T| -four * x - x * x * x),
            scalar_field(|x: T| x),
            scalar_field(|x: T| x),
            T::one(),
            vec![T::one()],
            T::one(),
        )
        .expect("valid catalog problem")
        .with_split(scalar_field(move |x: T| -four * x), scalar_field(|x: T| -(x * x * x)))
        .expect("exact split")
    }

    /// `dX = a X dt` with no noise coefficients and `λ = 0`.
    pub fn linear<T: Scalar>(slope: f64) -> JumpDiffusionProblem<T> {
        let a = T::of(slope);
        JumpDiffusionProblem::new(
            "linear",
            1,
            scalar_field(move |x: T| a * x),
            zero_field(),
            zero_field(),
            T::zero(),
            vec![T::one()],
            T::one(),
        )
        .expect("valid catalog problem")
    }

    /// `dX = a X dt + b X dW + c X dN` with rate `λ`, `X(0) = 1`, `T = 1`.
    pub fn linear_jump<T: Scalar>(a: f64, b: f64, c: f64, intensity: f64) -> JumpDiffusionProblem<T> {
        let (a, b, c) = (T::of(a), T::of(b), T::of(c));
        JumpDiffusionProblem::new(
            "linear-jump",
            1,
            scalar_field(move |x: T| a * x),
            scalar_field(move |x: T| b * x),
            scalar_field(move |x: T| c * x),
            T::of(intensity),
            vec![T::one()],
            T::one(),
        )
        .expect("valid catalog problem")
    }

    /// All coefficients zero, `λ = 1`, `X(0) = 1`.
    pub fn zero<T: Scalar>() -> JumpDiffusionProblem<T> {
        JumpDiffusionProblem::new(
            "zero",
            1,
            zero_field(),
            zero_field(),
            zero_field(),
            T::one(),
            vec![T::one()],
            T::one(),
        )
        .expect("valid catalog problem")
    }
}
