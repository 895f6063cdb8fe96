//! Brownian and Poisson increments on a uniform grid, with exact dyadic
//! coarsening so that every step size is driven by one realization.
//!
//! A path with `M = q·2^k` steps (`q` odd) is generated coarse-to-fine:
//! `q` independent increments over `[0, T]` first, then `k` rounds of
//! halving, splitting every Brownian increment with the Brownian-bridge
//! midpoint law and every Poisson count with a Binomial(n, 1/2) thinning.
//! The fine increments are still i.i.d. `Normal(0, dt)` and
//! `Poisson(λ dt)`, and the first levels of randomness do not depend on the
//! final resolution: the same `(seed, stream_id)` at `2M` steps refines the
//! path sampled at `M` steps.
//!
//! Coarsened paths keep a handle to the finest increments they came from and
//! always sum those in ascending index order, which makes `coarsen`
//! associative bit-for-bit.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::JumpDiffusionProblem;
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
struct Increments<T> {
    /// Row-major `steps × m`.
    brownian: Vec<T>,
    poisson: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct NoisePath<T: Scalar> {
    steps: usize,
    brownian_dim: usize,
    dt: T,
    intensity: T,
    seed: u64,
    stream_id: u64,
    increments: Arc<Increments<T>>,
    /// Increments of the path this one was coarsened from (itself for a root).
    finest: Arc<Increments<T>>,
    /// Number of finest steps per step of this path.
    stride: usize,
}

impl<T: Scalar> PartialEq for NoisePath<T> {
    fn eq(&self, other: &Self) -> bool {
        self.steps == other.steps
            && self.brownian_dim == other.brownian_dim
            && self.dt == other.dt
            && self.intensity == other.intensity
            && self.seed == other.seed
            && self.stream_id == other.stream_id
            && self.increments == other.increments
    }
}

impl<T: Scalar> NoisePath<T> {
    /// Builds a root path from explicit increments (`brownian` row-major, `steps × m`).
    pub fn from_increments(
        brownian_dim: usize,
        dt: T,
        intensity: T,
        brownian: Vec<T>,
        poisson: Vec<u64>,
        seed: u64,
        stream_id: u64,
    ) -> Result<Self> {
        let steps = poisson.len();
        if steps == 0 || brownian_dim == 0 {
            return Err(Error::InvalidArgument("noise path needs at least one step and one brownian dimension".into()));
        }
        if brownian.len() != steps * brownian_dim {
            return Err(Error::DimensionMismatch {
                what: "brownian increments",
                expected: steps * brownian_dim,
                got: brownian.len(),
            });
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be finite and positive, got {dt}")));
        }
        if !(intensity >= T::zero()) || !intensity.is_finite() {
            return Err(Error::InvalidArgument(format!("intensity must be finite and non-negative, got {intensity}")));
        }
        let increments = Arc::new(Increments { brownian, poisson });
        Ok(Self {
            steps,
            brownian_dim,
            dt,
            intensity,
            seed,
            stream_id,
            finest: Arc::clone(&increments),
            increments,
            stride: 1,
        })
    }

    /// A path of `steps` zero increments matching `problem` (the noise-free realization).
    pub fn zeros(problem: &JumpDiffusionProblem<T>, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        let m = problem.brownian_dim();
        Self::from_increments(
            m,
            problem.horizon() / T::of(steps as f64),
            problem.intensity(),
            vec![T::zero(); steps * m],
            vec![0; steps],
            0,
            0,
        )
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn brownian_dim(&self) -> usize {
        self.brownian_dim
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn horizon(&self) -> T {
        self.dt * T::of(self.steps as f64)
    }

    pub fn intensity(&self) -> T {
        self.intensity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn brownian_increments(&self) -> &[T] {
        &self.increments.brownian
    }

    pub fn poisson_increments(&self) -> &[u64] {
        &self.increments.poisson
    }

    /// `ΔW_n` as an `m`-vector.
    pub fn brownian_row(&self, n: usize) -> &[T] {
        &self.increments.brownian[n * self.brownian_dim..(n + 1) * self.brownian_dim]
    }

    pub fn poisson_at(&self, n: usize) -> u64 {
        self.increments.poisson[n]
    }

    /// Running sums `(W(t_i), N(t_i))` for every grid index `0..=steps`,
    /// accumulated over the finest increments in ascending order.
    pub fn cumulative_table(&self) -> CumulativeNoise<T> {
        let m = self.brownian_dim;
        let mut w = Vec::with_capacity((self.steps + 1) * m);
        let mut n = Vec::with_capacity(self.steps + 1);
        let mut acc_w = vec![T::zero(); m];
        let mut acc_n = 0u64;
        w.extend_from_slice(&acc_w);
        n.push(acc_n);
        for (i, (row, &dn)) in self.finest.brownian.chunks_exact(m).zip(&self.finest.poisson).enumerate() {
            for (a, &b) in acc_w.iter_mut().zip(row) {
                *a = *a + b;
            }
            acc_n += dn;
            if (i + 1) % self.stride == 0 {
                w.extend_from_slice(&acc_w);
                n.push(acc_n);
            }
        }
        CumulativeNoise { brownian_dim: m, w, n }
    }
}

/// Prefix sums of a [`NoisePath`], indexable by grid index.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeNoise<T> {
    brownian_dim: usize,
    w: Vec<T>,
    n: Vec<u64>,
}

impl<T: Scalar> CumulativeNoise<T> {
    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn brownian(&self, index: usize) -> &[T] {
        &self.w[index * self.brownian_dim..(index + 1) * self.brownian_dim]
    }

    pub fn poisson(&self, index: usize) -> u64 {
        self.n[index]
    }
}

/// Samples one path of `steps` increments over `[0, problem.horizon]`.
pub fn sample_noise<T: Scalar>(
    problem: &JumpDiffusionProblem<T>,
    steps: usize,
    seed: u64,
    stream_id: u64,
) -> Result<NoisePath<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let m = problem.brownian_dim();
    let horizon = problem.horizon().as_f64();
    let intensity = problem.intensity().as_f64();
    let dt = horizon / steps as f64;
    let odd = steps >> steps.trailing_zeros();
    let base_len = horizon / odd as f64;
    let base_mean = intensity * base_len;
    if !(intensity * dt).is_finite() || !base_mean.is_finite() {
        return Err(Error::PoissonOverflow { intensity, dt });
    }

    let mut rng = rng::stream_rng(seed, stream_id);
    let mut brownian = Vec::with_capacity(odd * m);
    let mut poisson = Vec::with_capacity(odd);
    let base_sd = base_len.sqrt();
    for _ in 0..odd {
        for _ in 0..m {
            brownian.push(base_sd * rng::standard_normal(&mut rng));
        }
        poisson.push(rng::poisson(&mut rng, base_mean));
    }

    let mut len = base_len;
    let mut count = odd;
    while count < steps {
        // midpoint of a bridge over `len`: W(mid) - W(a) | W(b) - W(a) = w  ~  N(w/2, len/4)
        let half_sd = 0.5 * len.sqrt();
        let mut next_w = Vec::with_capacity(2 * count * m);
        let mut next_n = Vec::with_capacity(2 * count);
        for (row, &dn) in brownian.chunks_exact(m).zip(&poisson) {
            let start = next_w.len();
            for &w in row {
                let left = 0.5 * w + half_sd * rng::standard_normal(&mut rng);
                next_w.push(left);
            }
            for c in 0..m {
                let left = next_w[start + c];
                next_w.push(row[c] - left);
            }
            let left = rng::binomial_half(&mut rng, dn);
            next_n.push(left);
            next_n.push(dn - left);
        }
        brownian = next_w;
        poisson = next_n;
        count *= 2;
        len *= 0.5;
    }

    NoisePath::from_increments(
        m,
        problem.horizon() / T::of(steps as f64),
        problem.intensity(),
        brownian.into_iter().map(T::of).collect(),
        poisson,
        seed,
        stream_id,
    )
}

/// Merges every `factor` consecutive steps into one.
pub fn coarsen<T: Scalar>(path: &NoisePath<T>, factor: usize) -> Result<NoisePath<T>> {
    if factor == 0 || !path.steps.is_multiple_of(factor) {
        return Err(Error::NotDivisible { factor, steps: path.steps });
    }
    if factor == 1 {
        return Ok(path.clone());
    }
    let m = path.brownian_dim;
    let steps = path.steps / factor;
    let stride = path.stride * factor;
    let finest = &path.finest;
    let mut brownian = Vec::with_capacity(steps * m);
    let mut poisson = Vec::with_capacity(steps);
    for (block_w, block_n) in finest.brownian.chunks_exact(stride * m).zip(finest.poisson.chunks_exact(stride)) {
        for c in 0..m {
            let mut acc = T::zero();
            for i in 0..stride {
                acc = acc + block_w[i * m + c];
            }
            brownian.push(acc);
        }
        poisson.push(block_n.iter().sum());
    }
    Ok(NoisePath {
        steps,
        brownian_dim: m,
        dt: path.dt * T::of(factor as f64),
        intensity: path.intensity,
        seed: path.seed,
        stream_id: path.stream_id,
        increments: Arc::new(Increments { brownian, poisson }),
        finest: Arc::clone(finest),
        stride,
    })
}

/// `ΔN̄ = ΔN − λ dt`.
pub fn compensated_increment<T: Scalar>(dn: u64, intensity: T, dt: T) -> T {
    T::of(dn as f64) - intensity * dt
}

/// `(W(t_i), N(t_i))` at grid index `fine_index`.
pub fn cumulative<T: Scalar>(path: &NoisePath<T>, fine_index: usize) -> Result<(Vec<T>, u64)> {
    if fine_index > path.steps {
        return Err(Error::InvalidArgument(format!("grid index {fine_index} outside 0..={}", path.steps)));
    }
    let m = path.brownian_dim;
    let end = fine_index * path.stride;
    let mut w = vec![T::zero(); m];
    for row in path.finest.brownian[..end * m].chunks_exact(m) {
        for (a, &b) in w.iter_mut().zip(row) {
            *a = *a + b;
        }
    }
    let n = path.finest.poisson[..end].iter().sum();
    Ok((w, n))
}

const MAGIC_LEN: usize = 6 * 8;

/// Little-endian dump: header `steps, m, dt, intensity, seed, stream_id`
/// as 64-bit fields, then Brownian increments (`f64`, row-major) and
/// Poisson increments (`u64`).
pub fn write_noise<T: Scalar, W: Write>(path: &NoisePath<T>, mut out: W) -> Result<()> {
    let mut buf = Vec::with_capacity(MAGIC_LEN + path.steps * (path.brownian_dim + 1) * 8);
    buf.extend_from_slice(&(path.steps as u64).to_le_bytes());
    buf.extend_from_slice(&(path.brownian_dim as u64).to_le_bytes());
    buf.extend_from_slice(&path.dt.as_f64().to_le_bytes());
    buf.extend_from_slice(&path.intensity.as_f64().to_le_bytes());
    buf.extend_from_slice(&path.seed.to_le_bytes());
    buf.extend_from_slice(&path.stream_id.to_le_bytes());
    for w in path.brownian_increments() {
        buf.extend_from_slice(&w.as_f64().to_le_bytes());
    }
    for n in path.poisson_increments() {
        buf.extend_from_slice(&n.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_noise<T: Scalar, R: Read>(mut input: R) -> Result<NoisePath<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < MAGIC_LEN {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i * 8..i * 8 + 8].try_into().expect("8 bytes") };
    let steps = u64::from_le_bytes(word(0)) as usize;
    let m = u64::from_le_bytes(word(1)) as usize;
    let dt = f64::from_le_bytes(word(2));
    let intensity = f64::from_le_bytes(word(3));
    let seed = u64::from_le_bytes(word(4));
    let stream_id = u64::from_le_bytes(word(5));
    let expected = steps
        .checked_mul(m + 1)
        .and_then(|w| w.checked_mul(8))
        .and_then(|b| b.checked_add(MAGIC_LEN))
        .ok_or_else(|| Error::Format("header sizes overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let body = 6;
    let brownian = (0..steps * m).map(|i| T::of(f64::from_le_bytes(word(body + i)))).collect();
    let poisson = (0..steps).map(|i| u64::from_le_bytes(word(body + steps * m + i))).collect();
    NoisePath::from_increments(m, T::of(dt), T::of(intensity), brownian, poisson, seed, stream_id)
}
