//! Deterministic synthetic signals: smooth random trajectories in `R^3` and
//! high-dimensional stand-ins for vectorized video.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{resample, uniform_grid, Signal};
use crate::trg::Warp;

pub const DEFAULT_SMOOTHNESS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Trajectory3d,
    Highdim,
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trajectory3d" => Ok(Self::Trajectory3d),
            "highdim" => Ok(Self::Highdim),
            other => Err(Error::Config(format!(
                "unknown signal kind {other:?}, expected trajectory3d or highdim"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub kind: SignalKind,
    #[serde(rename = "T")]
    pub len: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_smoothness")]
    pub smoothness: usize,
}

fn default_smoothness() -> usize {
    DEFAULT_SMOOTHNESS
}

impl TemplateSpec {
    pub fn trajectory(len: usize, seed: u64) -> Self {
        Self {
            kind: SignalKind::Trajectory3d,
            len,
            n: 3,
            seed,
            smoothness: DEFAULT_SMOOTHNESS,
        }
    }

    pub fn highdim(len: usize, n: usize, seed: u64) -> Self {
        Self {
            kind: SignalKind::Highdim,
            len,
            n,
            seed,
            smoothness: DEFAULT_SMOOTHNESS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 5 {
            return Err(Error::Config(format!(
                "template T must be >= 5, got {}",
                self.len
            )));
        }
        if self.smoothness < 1 {
            return Err(Error::Config("smoothness must be at least 1".into()));
        }
        match self.kind {
            SignalKind::Trajectory3d if self.n != 3 => Err(Error::Config(format!(
                "trajectory3d templates have n = 3, got {}",
                self.n
            ))),
            SignalKind::Highdim if self.n < 2 => Err(Error::Config(format!(
                "highdim templates need n >= 2, got {}",
                self.n
            ))),
            _ => Ok(()),
        }
    }
}

/// Random truncated Fourier series per dimension, normalized to zero mean
/// and unit RMS amplitude.
///
/// Dimension `d` is `sum_k (a_k cos(k pi t) + b_k sin(k pi t)) / k^2` for
/// `k = 1..=smoothness`, with standard normal `a_k`, `b_k`. The samples are
/// then shifted to zero mean per dimension and scaled so that
/// `sqrt(mean_i |X_i|^2) = 1`.
pub fn generate_template(spec: &TemplateSpec) -> Result<Signal> {
    spec.validate()?;
    let (len, dim, modes) = (spec.len, spec.n, spec.smoothness);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coeffs: Vec<(f64, f64)> = (0..dim * modes)
        .map(|m| {
            let k = (m % modes + 1) as f64;
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (a / (k * k), b / (k * k))
        })
        .collect();

    let grid = uniform_grid(len)?;
    let basis: Vec<(f64, f64)> = grid
        .values()
        .iter()
        .flat_map(|&t| (1..=modes).map(move |k| (k as f64 * PI * t).sin_cos()))
        .collect();

    let mut data = Vec::with_capacity(len * dim);
    for i in 0..len {
        let row_basis = &basis[i * modes..(i + 1) * modes];
        for d in 0..dim {
            let c = &coeffs[d * modes..(d + 1) * modes];
            let v: f64 = c
                .iter()
                .zip(row_basis)
                .map(|((a, b), (sin, cos))| a * cos + b * sin)
                .sum();
            data.push(v);
        }
    }

    let mut mean = vec![0.0; dim];
    for row in data.chunks_exact(dim) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= len as f64);
    for row in data.chunks_exact_mut(dim) {
        for (v, m) in row.iter_mut().zip(&mean) {
            *v -= m;
        }
    }
    let rms = (data.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt();
    if rms > 0.0 {
        data.iter_mut().for_each(|v| *v /= rms);
    }
    Signal::new(len, dim, data)
}

/// Two independently warped copies of `template`, using warp seeds
/// `2 * seed + 1` and `2 * seed + 2`.
pub fn warped_pair(template: &Signal, seed: u64, roughness: f64) -> Result<(Signal, Signal)> {
    let (s1, s2) = pair_seeds(seed);
    let w1 = Warp::random(template.len(), s1, roughness)?;
    let w2 = Warp::random(template.len(), s2, roughness)?;
    Ok((resample(template, &w1), resample(template, &w2)))
}

fn pair_seeds(seed: u64) -> (u64, u64) {
    let base = seed.wrapping_mul(2);
    (base.wrapping_add(1), base.wrapping_add(2))
}
