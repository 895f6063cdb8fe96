//! Library results against independent hand-written computations.

mod common;

use std::fs::File;
use std::io::BufReader;

use jumptame::noise::{read_noise, write_noise};
use jumptame::problem::scalar_field;
use jumptame::rng::stream_rng;
use jumptame::*;
use rand::Rng;

/// Rewrites the stored noise path and the golden CTS states. Run with
/// `cargo test --test oracles -- --ignored regenerate_fixtures`.
#[test]
#[ignore]
fn regenerate_fixtures() {
    let p = catalog::cubic::<f64>();
    let noise = sample_noise(&p, common::FIXTURE_STEPS, common::FIXTURE_SEED, common::FIXTURE_STREAM).unwrap();
    std::fs::create_dir_all(common::fixture_dir()).unwrap();
    write_noise(&noise, File::create(common::noise_fixture()).unwrap()).unwrap();
    let golden = common::cts_cubic_oracle(1.0, noise.dt(), noise.brownian_increments(), noise.poisson_increments());
    std::fs::write(common::golden_fixture(), common::format_golden(&golden)).unwrap();
}

#[test]
fn fixture_golden_matches_oracle() {
    let noise: Noise = read_noise(BufReader::new(File::open(common::noise_fixture()).unwrap())).unwrap();
    let golden = common::parse_golden(&std::fs::read_to_string(common::golden_fixture()).unwrap());
    let oracle = common::cts_cubic_oracle(1.0, noise.dt(), noise.brownian_increments(), noise.poisson_increments());
    assert_eq!(golden.len(), common::FIXTURE_STEPS + 1);
    assert!(golden.iter().zip(&oracle).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn cts_matches_oracle_on_fresh_noise() {
    let p = catalog::cubic::<f64>();
    for id in 0..50 {
        let noise = sample_noise(&p, 128, 99, id).unwrap();
        let path = simulate(&p, SchemeId::Cts, &noise).unwrap();
        let oracle = common::cts_cubic_oracle(1.0, noise.dt(), noise.brownian_increments(), noise.poisson_increments());
        for (a, b) in path.states().iter().zip(&oracle) {
            assert_eq!(a.to_bits(), b.to_bits(), "path {id}");
        }
    }
}

#[test]
fn cubic_one_sided_constant_against_grid() {
    // brute force over a grid in [−2, 2]²
    let f = |x: f64| -4.0 * x - x * x * x;
    let mut grid_max = f64::NEG_INFINITY;
    let n = 400;
    for i in 0..=n {
        for j in 0..=n {
            let x = -2.0 + 4.0 * i as f64 / n as f64;
            let y = -2.0 + 4.0 * j as f64 / n as f64;
            if (x - y).abs() < 1e-8 {
                continue;
            }
            grid_max = grid_max.max((x - y) * (f(x) - f(y)) / ((x - y) * (x - y)));
        }
    }
    let report = probe_assumptions(&catalog::cubic::<f64>(), 20_000, 2.0, 11).unwrap();
    // the supremum −4 is approached along x = −y → 0, which neither set hits exactly
    assert!(grid_max <= -4.0 && report.one_sided_constant <= -4.0 + 1e-9);
    assert!((report.one_sided_constant - grid_max).abs() < 0.05, "{} vs {grid_max}", report.one_sided_constant);
}

#[test]
fn f_lambda_is_drift_plus_scaled_jump() {
    let p = catalog::linear_jump::<f64>(-1.5, 0.3, 0.7, 2.5);
    let mut rng = stream_rng(5, 5);
    for _ in 0..200 {
        let x = [rng.random_range(-10.0..10.0)];
        let fl = p.f_lambda(&x).unwrap();
        let expected = p.drift(&x).unwrap()[0] + 2.5 * p.jump(&x).unwrap()[0];
        assert_eq!(fl[0], expected);
    }
    let no_jumps = p.clone().with_jump_coeff(problem::zero_field());
    assert_eq!(no_jumps.f_lambda(&[3.0]).unwrap(), no_jumps.drift(&[3.0]).unwrap());
    let no_rate = p.with_intensity(0.0).unwrap();
    assert_eq!(no_rate.f_lambda(&[3.0]).unwrap(), no_rate.drift(&[3.0]).unwrap());
}

#[test]
fn euler_one_step_conditional_mean() {
    // E[Y_1] = y(1 + a·dt + c·λ·dt) for dX = aX dt + bX dW + cX dN
    let (a, b, c, lambda) = (-1.0, 0.5, 0.5, 1.0);
    let dt = 0.125;
    let p = catalog::linear_jump::<f64>(a, b, c, lambda).with_horizon(dt).unwrap();
    let n = 200_000;
    let values: Vec<f64> = (0..n)
        .map(|id| {
            let noise = sample_noise(&p, 1, 3, id).unwrap();
            simulate(&p, SchemeId::Em, &noise).unwrap().state(1)[0]
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let expected = 1.0 + a * dt + c * lambda * dt;
    assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected} ± {se}");
}

#[test]
fn linear_jump_strong_order_against_exact_solution() {
    // X_t = exp((a − b²/2)t + bW_t)(1 + c)^{N_t}
    let (a, b, c) = (-1.0, 0.5, 0.5);
    let p = catalog::linear_jump::<f64>(a, b, c, 1.0);
    let fine_steps = 4096;
    let levels = [16usize, 32, 64, 128, 256];
    let n = 300;
    let mut acc = [0.0; 5];
    for id in 0..n {
        let fine = sample_noise(&p, fine_steps, 8, id).unwrap();
        let table = fine.cumulative_table();
        let exact: Vec<f64> = (0..=fine_steps)
            .map(|i| {
                let t = i as f64 / fine_steps as f64;
                ((a - b * b / 2.0) * t + b * table.brownian(i)[0]).exp() * (1.0 + c).powi(table.poisson(i) as i32)
            })
            .collect();
        for (k, &level) in levels.iter().enumerate() {
            let coarse = coarsen(&fine, fine_steps / level).unwrap();
            let path = simulate(&p, SchemeId::Cts, &coarse).unwrap();
            let mut sup = 0.0f64;
            Interpolant::new(&p, &path, &fine)
                .unwrap()
                .for_each(|i, v| sup = sup.max((v[0] - exact[i]).abs()))
                .unwrap();
            acc[k] += sup * sup;
        }
    }
    let rows: Vec<(f64, f64)> = levels.iter().zip(acc).map(|(&l, s)| (1.0 / l as f64, (s / n as f64).sqrt())).collect();
    let (order, _) = analysis::fit_order(&rows).unwrap();
    assert!((0.4..0.7).contains(&order), "order {order}");
}

#[test]
fn noise_free_euler_iterates() {
    let p = catalog::cubic::<f64>().with_horizon(1.5).unwrap();
    let noise = NoisePath::zeros(&p, 3).unwrap();
    let em = simulate(&p, SchemeId::Em, &noise).unwrap();
    // y − 0.5(4y + y³) by hand
    assert_eq!(em.states()[..4], [1.0, -1.5, 3.1875, -19.3802490234375][..]);
}

#[test]
fn scalar_problem_with_custom_fields() {
    let p = catalog::zero::<f64>().with_drift(scalar_field(|x: f64| 2.0 - x)).with_intensity(0.0).unwrap();
    let noise = NoisePath::zeros(&p, 4).unwrap();
    let path = simulate(&p, SchemeId::Ncts, &noise).unwrap();
    // first NCTS step from 1: 1 + 0.25·1/(1 + 0.25·1)
    assert_eq!(path.state(1)[0], 1.0 + 0.25 / 1.25);
}
