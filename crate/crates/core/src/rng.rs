//! Random stream derivation and the small samplers the noise generator needs.
//!
//! Every `(seed, stream_id)` pair maps to its own ChaCha12 generator through
//! a fixed 64-bit mixing function, so a path can be regenerated on any
//! thread and on any platform from those two numbers alone.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// Largest Poisson mean sampled by sequential-search inversion.
pub const INVERSION_MAX_MEAN: f64 = 10.0;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix(seed, stream_id)`: the sub-seed of one path's generator.
pub fn stream_seed(seed: u64, stream_id: u64) -> u64 {
    mix64(seed ^ mix64(stream_id.wrapping_add(GOLDEN_GAMMA)))
}

pub fn stream_rng(seed: u64, stream_id: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(stream_seed(seed, stream_id))
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Poisson(mean) draw. Inversion by sequential search up to
/// [`INVERSION_MAX_MEAN`], the PTRS rejection sampler of `rand_distr` above.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    debug_assert!(mean.is_finite() && mean >= 0.0);
    if mean == 0.0 {
        return 0;
    }
    if mean > INVERSION_MAX_MEAN {
        let dist = Poisson::new(mean).expect("finite positive mean");
        let k: f64 = dist.sample(rng);
        return k as u64;
    }
    let u: f64 = rng.random();
    let mut prob = (-mean).exp();
    let mut cdf = prob;
    let mut k = 0u64;
    while u > cdf {
        k += 1;
        prob *= mean / k as f64;
        let next = cdf + prob;
        if next == cdf {
            // cdf saturated below u through rounding; the remaining mass is negligible
            break;
        }
        cdf = next;
    }
    k
}

/// Binomial(n, 1/2) draw as a popcount of `n` fair random bits.
pub fn binomial_half<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    let mut remaining = n;
    let mut count = 0u64;
    while remaining >= 64 {
        count += u64::from(rng.next_u64().count_ones());
        remaining -= 64;
    }
    if remaining > 0 {
        let mask = (1u64 << remaining) - 1;
        count += u64::from((rng.next_u64() & mask).count_ones());
    }
    count
}
