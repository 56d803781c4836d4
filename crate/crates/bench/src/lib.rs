//! Fixtures shared by the criterion benchmarks.

pub use gora_core;

use gora_core::{generate_template, warped_pair, Signal, TemplateSpec};

/// Roughness of the random warps applied to benchmark templates.
pub const ROUGHNESS: f64 = 0.5;

/// A warped pair of smooth `R^3` trajectories with `len` samples.
pub fn trajectory_pair(len: usize, seed: u64) -> (Signal, Signal) {
    let template = generate_template(&TemplateSpec::trajectory(len, seed))
        .expect("benchmark template spec is valid");
    warped_pair(&template, seed, ROUGHNESS).expect("benchmark warp is valid")
}

/// A warped pair of high-dimensional templates.
pub fn highdim_pair(len: usize, dim: usize, seed: u64) -> (Signal, Signal) {
    let template = generate_template(&TemplateSpec::highdim(len, dim, seed))
        .expect("benchmark template spec is valid");
    warped_pair(&template, seed, ROUGHNESS).expect("benchmark warp is valid")
}
