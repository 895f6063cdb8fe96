//! Distributional checks on the generated noise and the error estimator.

use jumptame::analysis::sample_errors;
use jumptame::*;

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.clone().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (mean, var, m4)
}

#[test]
fn million_step_path_moments() {
    let p = catalog::zero::<f64>();
    let steps = 1 << 20;
    let noise = sample_noise(&p, steps, 4, 0).unwrap();
    let dt = 1.0 / steps as f64;
    let n = steps as f64;
    let (mean_n, _, _) = mean_var(noise.poisson_increments().iter().map(|&k| k as f64));
    assert!((mean_n - dt).abs() <= 3.0 * (dt / n).sqrt(), "{mean_n}");
    let (_, var_w, _) = mean_var(noise.brownian_increments().iter().copied());
    assert!((var_w - dt).abs() <= 3.0 * dt * (2.0 / (n - 1.0)).sqrt(), "{var_w}");
}

#[test]
fn compensated_increments_are_centred() {
    let lambda = 3.0;
    let p = catalog::zero::<f64>().with_intensity(lambda).unwrap().with_horizon(1000.0).unwrap();
    let steps = 200_000;
    let noise = sample_noise(&p, steps, 8, 1).unwrap();
    let dt = noise.dt();
    let xs = noise.poisson_increments().iter().map(|&k| compensated_increment(k, lambda, dt));
    let (mean, var, m4) = mean_var(xs);
    let n = steps as f64;
    assert!(mean.abs() <= 4.0 * (lambda * dt).sqrt() / n.sqrt(), "{mean}");
    // standard error of a sample variance: √((μ₄ − σ⁴)/n)
    let se = ((m4 - var * var) / n).sqrt();
    assert!((var - lambda * dt).abs() <= 4.0 * se, "{var} vs {}", lambda * dt);
}

#[test]
fn independent_streams_are_uncorrelated() {
    let p = catalog::zero::<f64>();
    let a = sample_noise(&p, 1 << 16, 1, 10).unwrap();
    let b = sample_noise(&p, 1 << 16, 1, 11).unwrap();
    let n = (1 << 16) as f64;
    let dt = 1.0 / n;
    let cov: f64 = a.brownian_increments().iter().zip(b.brownian_increments()).map(|(x, y)| x * y).sum::<f64>() / n;
    // each product has standard deviation dt
    assert!(cov.abs() < 4.0 * dt / n.sqrt(), "{cov}");
}

#[test]
fn large_poisson_means_use_the_rejection_sampler() {
    let lambda = 40.0;
    let p = catalog::zero::<f64>().with_intensity(lambda).unwrap().with_horizon(2000.0).unwrap();
    let noise = sample_noise(&p, 2000, 2, 2).unwrap();
    let (mean, var, _) = mean_var(noise.poisson_increments().iter().map(|&k| k as f64));
    let se = (lambda / 2000.0).sqrt();
    assert!((mean - lambda).abs() < 4.0 * se, "{mean}");
    assert!((var / lambda - 1.0).abs() < 0.15, "{var}");
}

#[test]
fn finer_reference_barely_moves_the_estimate() {
    let p = catalog::cubic::<f64>();
    let at = |ref_steps| sample_errors(&p, SchemeId::Cts, &[64], ref_steps, 300, 5).unwrap().report(2.0).unwrap();
    let coarse = at(1 << 13);
    let fine = at(1 << 14);
    let (a, b) = (&coarse.rows[0], &fine.rows[0]);
    assert!((a.error - b.error).abs() < 2.0 * a.std_err.max(b.std_err), "{} vs {} ± {}", a.error, b.error, a.std_err);
}
