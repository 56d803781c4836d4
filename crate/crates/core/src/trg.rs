//! Elements of the temporal reparameterization group: sampled, strictly
//! increasing maps of `[0, 1]` onto itself that fix both endpoints.

use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::io;
use crate::signal::{interp_uniform, uniform_grid};

/// Endpoint values within this distance of 0 or 1 are snapped onto them.
const ENDPOINT_TOLERANCE: f64 = 1e-9;

/// Fourier modes in the log-speed of a random warp.
const RANDOM_MODES: usize = 8;

/// Upper bound on max/min slope of a random warp.
const MAX_SLOPE_RATIO: f64 = 20.0;

/// A warp sampled on the uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Warp {
    values: Vec<f64>,
    derivative_floor: f64,
}

impl Warp {
    pub fn identity(len: usize) -> Result<Self> {
        let values = uniform_grid(len)?.into_vec();
        Ok(Self {
            values,
            derivative_floor: 1.0,
        })
    }

    /// Validates sampled warp values, snapping near-exact endpoints.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if len < 2 {
            return Err(Error::InvalidSize {
                what: "warp length",
                min: 2,
                got: len,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        if values[0].abs() > ENDPOINT_TOLERANCE
            || (values[len - 1] - 1.0).abs() > ENDPOINT_TOLERANCE
        {
            return Err(Error::Degenerate(format!(
                "warp endpoints are {} and {}, expected 0 and 1",
                values[0],
                values[len - 1]
            )));
        }
        values[0] = 0.0;
        values[len - 1] = 1.0;
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Degenerate(format!(
                "warp is not strictly increasing at index {}",
                i + 1
            )));
        }
        let derivative_floor = min_slope(&values);
        Ok(Self {
            values,
            derivative_floor,
        })
    }

    /// Deterministic random warp with a smooth, bounded, positive slope.
    ///
    /// The log-slope is a random sine/cosine series with `8` modes whose
    /// coefficients are standard normal scaled by `1/k` and by `roughness`.
    /// If the resulting slope varies by more than a factor of 20, the
    /// log-slope is shrunk towards its midpoint until it does not. The slope
    /// is integrated with the trapezoid rule and normalized to end at 1.
    pub fn random(len: usize, seed: u64, roughness: f64) -> Result<Self> {
        let grid = uniform_grid(len)?;
        if !roughness.is_finite() || roughness < 0.0 {
            return Err(Error::Config(format!(
                "roughness must be finite and non-negative, got {roughness}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<(f64, f64)> = (1..=RANDOM_MODES)
            .map(|k| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (a / k as f64, b / k as f64)
            })
            .collect();

        let mut log_speed: Vec<f64> = grid
            .values()
            .iter()
            .map(|&t| {
                let series: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, (a, b))| {
                        let w = (m + 1) as f64 * PI * t;
                        a * w.sin() + b * w.cos()
                    })
                    .sum();
                roughness * series
            })
            .collect();

        let hi = log_speed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = log_speed.iter().copied().fold(f64::INFINITY, f64::min);
        let limit = MAX_SLOPE_RATIO.ln();
        let scale = if hi - lo > limit {
            limit / (hi - lo)
        } else {
            1.0
        };
        for v in &mut log_speed {
            *v = (*v - hi) * scale;
        }

        let speed: Vec<f64> = log_speed.iter().map(|v| v.exp()).collect();
        let mut values = Vec::with_capacity(len);
        let mut acc = 0.0;
        values.push(0.0);
        for w in speed.windows(2) {
            acc += 0.5 * (w[0] + w[1]);
            values.push(acc);
        }
        for v in &mut values {
            *v /= acc;
        }
        values[len - 1] = 1.0;
        let derivative_floor = min_slope(&values);
        Ok(Self {
            values,
            derivative_floor,
        })
    }

    /// `(self o inner)(t) = self(inner(t))`, sampled on `inner`'s grid.
    pub fn compose(&self, inner: &Warp) -> Result<Warp> {
        let values: Vec<f64> = inner.values.iter().map(|&t| self.eval(t)).collect();
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Degenerate(format!(
                "composition lost strict monotonicity at index {}",
                i + 1
            )));
        }
        let derivative_floor = min_slope(&values);
        Ok(Warp {
            values,
            derivative_floor,
        })
    }

    /// Piecewise-linear evaluation at `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        interp_uniform(&self.values, t)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest discrete slope `(v[i+1] - v[i]) * (T - 1)`.
    pub fn derivative_floor(&self) -> f64 {
        self.derivative_floor
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let last = (self.len() - 1) as f64;
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| (v - i as f64 / last).abs() <= tol)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let rows = io::read_rows(path)?;
        if let Some(row) = rows.iter().position(|r| r.len() != 1) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: row + 1,
                message: "warp files hold one value per row".into(),
            });
        }
        Self::from_values(rows.into_iter().map(|r| r[0]).collect())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_rows(path, self.values.chunks(1))
    }
}

fn min_slope(values: &[f64]) -> f64 {
    let last = (values.len() - 1) as f64;
    values
        .windows(2)
        .map(|w| (w[1] - w[0]) * last)
        .fold(f64::INFINITY, f64::min)
}
