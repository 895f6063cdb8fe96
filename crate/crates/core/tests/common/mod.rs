//! Shared by several integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

pub const FIXTURE_STEPS: usize = 256;
pub const FIXTURE_SEED: u64 = 20240611;
pub const FIXTURE_STREAM: u64 = 7;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn noise_fixture() -> PathBuf {
    fixture_dir().join("cubic_noise_256.bin")
}

pub fn golden_fixture() -> PathBuf {
    fixture_dir().join("cubic_cts_256.golden")
}

/// CTS on dX = (−4X − X³)dt + X dW + X dN with λ = 1, written out by hand.
pub fn cts_cubic_oracle(x0: f64, dt: f64, dw: &[f64], dn: &[u64]) -> Vec<f64> {
    let lambda = 1.0;
    let mut y = x0;
    let mut out = vec![y];
    for (w, &n) in dw.iter().zip(dn) {
        let f = -4.0 * y - y * y * y;
        let fl = f + lambda * y;
        let tamed = (dt * fl) / (1.0 + dt * fl.abs());
        let jump = n as f64 - lambda * dt;
        y = ((y + tamed) + y * w) + y * jump;
        out.push(y);
    }
    out
}

pub fn format_golden(states: &[f64]) -> String {
    states.iter().map(|s| format!("{:016x}\n", s.to_bits())).collect()
}

pub fn parse_golden(text: &str) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| f64::from_bits(u64::from_str_radix(l.trim(), 16).expect("hex line")))
        .collect()
}
