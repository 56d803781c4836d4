//! Discretized signals on the implicit uniform grid over `[0, 1]`.
//!
//! A [`Signal`] with `T` rows and `n` columns is read as the discrete curve
//! `X(t_i)` in `R^n`, `t_i = i / (T - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trg::Warp;

/// Positions closer than this (in grid-index units) to a node snap onto it.
const NODE_SNAP: f64 = 1e-10;

/// Tolerance on sample times outside `[0, 1]`.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

/// A `T x n` matrix of finite samples, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    len: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Signal {
    pub fn new(len: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidSize {
                what: "signal length",
                min: 2,
                got: len,
            });
        }
        if dim < 1 {
            return Err(Error::InvalidSize {
                what: "signal dimension",
                min: 1,
                got: dim,
            });
        }
        if data.len() != len * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for a {len}x{dim} signal, got {}",
                len * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { len, dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), dim, data)
    }

    /// One-dimensional signal from a column of samples.
    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        Self::new(values.len(), 1, values)
    }

    /// Samples `f(t_i, d)` on the uniform grid.
    pub fn from_fn(len: usize, dim: usize, mut f: impl FnMut(f64, usize) -> f64) -> Result<Self> {
        let grid = uniform_grid(len)?;
        let mut data = Vec::with_capacity(len * dim);
        for &t in grid.values() {
            data.extend((0..dim).map(|d| f(t, d)));
        }
        Self::new(len, dim, data)
    }

    /// Number of time instances `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a signal holds at least two samples.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Column `d` as a freshly allocated vector.
    pub fn column(&self, d: usize) -> Vec<f64> {
        self.rows().map(|r| r[d]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn same_shape(&self, other: &Signal) -> Result<()> {
        if self.len != other.len || self.dim != other.dim {
            return Err(self.mismatch(other));
        }
        Ok(())
    }

    pub(crate) fn mismatch(&self, other: &Signal) -> Error {
        Error::IncompatibleSignals {
            left_len: self.len,
            left_dim: self.dim,
            right_len: other.len,
            right_dim: other.dim,
        }
    }
}

/// Ascending sample times in `[0, 1]` with fixed endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Grid spacing `1 / (T - 1)`.
    pub fn step(&self) -> f64 {
        1.0 / (self.0.len() - 1) as f64
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// The uniform grid `{i / (T - 1)}`.
pub fn uniform_grid(len: usize) -> Result<TimeGrid> {
    if len < 2 {
        return Err(Error::InvalidSize {
            what: "grid length",
            min: 2,
            got: len,
        });
    }
    let last = (len - 1) as f64;
    let mut values: Vec<f64> = (0..len).map(|i| i as f64 / last).collect();
    values[len - 1] = 1.0;
    Ok(TimeGrid(values))
}

/// Locates `x` on a uniform grid of `len >= 2` nodes over `[0, 1]`.
///
/// Returns the left node and the fractional offset towards the next one; the
/// offset is exactly zero when `x` falls on a node.
pub(crate) fn locate(x: f64, len: usize) -> (usize, f64) {
    let last = (len - 1) as f64;
    let pos = (x * last).clamp(0.0, last);
    let nearest = pos.round();
    if (pos - nearest).abs() <= NODE_SNAP {
        return (nearest as usize, 0.0);
    }
    let k = (pos.floor() as usize).min(len - 2);
    (k, pos - k as f64)
}

/// Piecewise-linear evaluation of uniformly sampled `values` at `x`.
pub(crate) fn interp_uniform(values: &[f64], x: f64) -> f64 {
    let (k, frac) = locate(x, values.len());
    if frac == 0.0 {
        values[k]
    } else {
        values[k] + frac * (values[k + 1] - values[k])
    }
}

/// Per-column estimate of `dX/dt` on the uniform grid.
///
/// Interior nodes use the five-point fourth-order central stencil, the two
/// nodes at each end the matching fourth-order one-sided stencils. Signals
/// shorter than five samples fall back to second-order differences (or a
/// plain forward difference when `T = 2`).
pub fn derivative(signal: &Signal) -> Signal {
    let len = signal.len();
    let dim = signal.dim();
    let h = 1.0 / (len - 1) as f64;
    let x = |i: usize, d: usize| signal.data[i * dim + d];
    let mut out = vec![0.0; len * dim];

    if len >= 5 {
        let inv = 1.0 / (12.0 * h);
        let last = len - 1;
        for d in 0..dim {
            out[d] = (-25.0 * x(0, d) + 48.0 * x(1, d) - 36.0 * x(2, d) + 16.0 * x(3, d)
                - 3.0 * x(4, d))
                * inv;
            out[dim + d] =
                (-3.0 * x(0, d) - 10.0 * x(1, d) + 18.0 * x(2, d) - 6.0 * x(3, d) + x(4, d)) * inv;
            for i in 2..last - 1 {
                out[i * dim + d] =
                    (-x(i + 2, d) + 8.0 * x(i + 1, d) - 8.0 * x(i - 1, d) + x(i - 2, d)) * inv;
            }
            out[(last - 1) * dim + d] = (3.0 * x(last, d) + 10.0 * x(last - 1, d)
                - 18.0 * x(last - 2, d)
                + 6.0 * x(last - 3, d)
                - x(last - 4, d))
                * inv;
            out[last * dim + d] = (25.0 * x(last, d) - 48.0 * x(last - 1, d)
                + 36.0 * x(last - 2, d)
                - 16.0 * x(last - 3, d)
                + 3.0 * x(last - 4, d))
                * inv;
        }
    } else if len >= 3 {
        let inv = 1.0 / (2.0 * h);
        let last = len - 1;
        for d in 0..dim {
            out[d] = (-3.0 * x(0, d) + 4.0 * x(1, d) - x(2, d)) * inv;
            for i in 1..last {
                out[i * dim + d] = (x(i + 1, d) - x(i - 1, d)) * inv;
            }
            out[last * dim + d] = (3.0 * x(last, d) - 4.0 * x(last - 1, d) + x(last - 2, d)) * inv;
        }
    } else {
        for d in 0..dim {
            let slope = (x(1, d) - x(0, d)) / h;
            out[d] = slope;
            out[dim + d] = slope;
        }
    }

    Signal {
        len,
        dim,
        data: out,
    }
}

/// `X o w` sampled on the warp's grid, interpolating each dimension linearly.
pub fn resample(signal: &Signal, warp: &Warp) -> Signal {
    resample_unchecked(signal, warp.values())
}

/// Evaluates the signal at arbitrary times in `[0, 1]` by linear interpolation.
pub fn resample_at(signal: &Signal, times: &[f64]) -> Result<Signal> {
    if times.len() < 2 {
        return Err(Error::InvalidSize {
            what: "sample time count",
            min: 2,
            got: times.len(),
        });
    }
    for (index, &value) in times.iter().enumerate() {
        if !(-DOMAIN_TOLERANCE..=1.0 + DOMAIN_TOLERANCE).contains(&value) {
            return Err(Error::Domain { index, value });
        }
    }
    Ok(resample_unchecked(signal, times))
}

fn resample_unchecked(signal: &Signal, times: &[f64]) -> Signal {
    let dim = signal.dim;
    let mut data = Vec::with_capacity(times.len() * dim);
    for &tau in times {
        let (k, frac) = locate(tau, signal.len);
        let lo = signal.row(k);
        if frac == 0.0 {
            data.extend_from_slice(lo);
        } else {
            let hi = signal.row(k + 1);
            data.extend(lo.iter().zip(hi).map(|(a, b)| a + frac * (b - a)));
        }
    }
    Signal {
        len: times.len(),
        dim,
        data,
    }
}

/// Mean Euclidean distance between corresponding rows.
pub fn pairwise_error(s1: &Signal, s2: &Signal) -> Result<f64> {
    s1.same_shape(s2)?;
    let total: f64 = s1.rows().zip(s2.rows()).map(|(a, b)| euclidean(a, b)).sum();
    Ok(total / s1.len() as f64)
}

/// Total length of the polyline through the samples.
pub fn polyline_length(signal: &Signal) -> f64 {
    signal
        .data
        .windows(2 * signal.dim)
        .step_by(signal.dim)
        .map(|w| euclidean(&w[..signal.dim], &w[signal.dim..]))
        .sum()
}

/// Largest curvature of the sampled curve times its arc length per grid step.
///
/// Values above 1 mean some bend has a radius smaller than the spacing of a
/// constant-speed resampling at the same `T`, so finite differences on the
/// resampled curve cannot resolve it. Zero-speed nodes give `+inf`.
pub fn resolution_ratio(signal: &Signal) -> f64 {
    let velocity = derivative(signal);
    let accel = derivative(&velocity);
    let mut max_curvature: f64 = 0.0;
    let mut length = 0.0;
    let mut prev_speed = None;
    for (v, a) in velocity.rows().zip(accel.rows()) {
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let aa: f64 = a.iter().map(|x| x * x).sum();
        let va: f64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
        let speed = vv.sqrt();
        let curvature = if vv > 0.0 {
            (vv * aa - va * va).max(0.0).sqrt() / (vv * speed)
        } else if aa > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_curvature = max_curvature.max(curvature);
        if let Some(p) = prev_speed {
            length += 0.5 * (p + speed);
        }
        prev_speed = Some(speed);
    }
    let steps = (signal.len() - 1) as f64;
    let arc_length = length / steps;
    max_curvature * arc_length / steps
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
