//! Globally optimal reparameterization to the universal standard timescale.
//!
//! For a signal `X`, the squared speed `g(t) = |dX/dt|^2` weights the cost
//! functional `J = integral of x'^2 g(x)` over warps `x` of `[0, 1]`. Its
//! global minimizer is `tau* = F^-1`, where
//! `F(s) = (1/c) * integral_0^s sqrt(g)` and `c = integral_0^1 sqrt(g)`.
//! Resampling `X` at `tau*` yields the constant-speed form `X*`, and the
//! minimum value of the functional is `c^2`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{derivative, interp_uniform, pairwise_error, resample, Signal};
use crate::trg::Warp;

/// Relative floor applied to `sqrt(g)` before integration.
pub const SPEED_FLOOR: f64 = 1e-9;

/// Tolerance on `F(0) = 0` and `F(1) = 1` for [`invert_monotone`].
const ENDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GoraResult {
    /// The optimal warp `tau*`.
    pub tau_star: Warp,
    /// `X o tau*`, sampled on the input grid.
    pub reparameterized: Signal,
    /// Integral of `sqrt(g)`; the total arc length of the input.
    pub c: f64,
    /// Cost functional of the input under its own timescale.
    pub j_input: f64,
    /// Cost functional of the reparameterized signal.
    pub j_ust: f64,
    /// Set when the input has zero speed everywhere.
    pub degenerate: bool,
}

/// Scalar part of a [`GoraResult`], as written to `summary.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoraSummary {
    pub c: f64,
    pub j_input: f64,
    pub j_ust: f64,
    pub degenerate: bool,
}

impl GoraResult {
    pub fn summary(&self) -> GoraSummary {
        GoraSummary {
            c: self.c,
            j_input: self.j_input,
            j_ust: self.j_ust,
            degenerate: self.degenerate,
        }
    }

    /// Writes `tau_star.csv`, `reparameterized.csv` and `summary.json`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        self.tau_star.write_csv(dir.join("tau_star.csv"))?;
        crate::io::write_csv(&self.reparameterized, dir.join("reparameterized.csv"))?;
        let json = serde_json::to_string_pretty(&self.summary())?;
        fs::write(dir.join("summary.json"), json + "\n")?;
        Ok(())
    }
}

/// Normalized cumulative integral of the regularized speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Cumulative {
    /// `F` at every grid node; `F[0] = 0`, `F[T-1] = 1`.
    pub f: Vec<f64>,
    pub c: f64,
    /// `g` vanished everywhere and the uniform fallback was used.
    pub degenerate: bool,
}

/// Squared speed `|dX/dt|^2` at every node.
pub fn compute_g(signal: &Signal) -> Vec<f64> {
    derivative(signal)
        .rows()
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect()
}

/// Steps 2 and 3 fused: one trapezoid pass gives both `c` and `F`.
///
/// `sqrt(g)` is floored at `SPEED_FLOOR * max sqrt(g)` so that `F` is
/// strictly increasing. When `g` is identically zero the speed is taken to
/// be 1, which makes `F` the uniform grid.
pub fn cumulative_f(g: &[f64]) -> Result<Cumulative> {
    let len = g.len();
    if len < 2 {
        return Err(Error::InvalidSize {
            what: "g length",
            min: 2,
            got: len,
        });
    }
    if let Some(i) = g.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "g must be finite and non-negative, got {} at index {i}",
            g[i]
        )));
    }
    let mut speed: Vec<f64> = g.iter().map(|v| v.sqrt()).collect();
    let max = speed.iter().copied().fold(0.0, f64::max);
    let degenerate = max == 0.0;
    if degenerate {
        speed.iter_mut().for_each(|s| *s = 1.0);
    } else {
        let floor = SPEED_FLOOR * max;
        speed.iter_mut().for_each(|s| *s = s.max(floor));
    }

    let h = 1.0 / (len - 1) as f64;
    let mut f = Vec::with_capacity(len);
    let mut acc = 0.0;
    f.push(0.0);
    for w in speed.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        f.push(acc);
    }
    let c = acc;
    for v in &mut f {
        *v /= c;
    }
    f[len - 1] = 1.0;
    Ok(Cumulative { f, c, degenerate })
}

/// Piecewise-linear inverse of a strictly increasing `F` sampled on the
/// uniform grid, evaluated back on the same grid in one merged sweep.
pub fn invert_monotone(f: &[f64]) -> Result<Warp> {
    let len = f.len();
    if len < 2 {
        return Err(Error::InvalidSize {
            what: "monotone map length",
            min: 2,
            got: len,
        });
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate(
            "monotone map has non-finite values".into(),
        ));
    }
    if f[0].abs() > ENDPOINT_TOLERANCE || (f[len - 1] - 1.0).abs() > ENDPOINT_TOLERANCE {
        return Err(Error::Degenerate(format!(
            "monotone map must run from 0 to 1, got {} to {}",
            f[0],
            f[len - 1]
        )));
    }
    if let Some(i) = f.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate(format!(
            "map is not strictly increasing at index {}",
            i + 1
        )));
    }

    let last = (len - 1) as f64;
    let mut tau = Vec::with_capacity(len);
    tau.push(0.0);
    let mut j = 0;
    for i in 1..len - 1 {
        let t = i as f64 / last;
        while j + 2 < len && f[j + 1] < t {
            j += 1;
        }
        let frac = ((t - f[j]) / (f[j + 1] - f[j])).clamp(0.0, 1.0);
        tau.push((j as f64 + frac) / last);
    }
    tau.push(1.0);
    Warp::from_values(tau)
}

/// Trapezoid estimate of `integral_0^1 |dX/dt|^2 dt`.
pub fn cost_functional(signal: &Signal) -> f64 {
    trapezoid(&compute_g(signal))
}

/// Runs the full reparameterization chain on one signal.
pub fn reparameterize(signal: &Signal) -> Result<GoraResult> {
    let g = compute_g(signal);
    let j_input = trapezoid(&g);
    let cumulative = cumulative_f(&g)?;
    if cumulative.degenerate {
        return Ok(GoraResult {
            tau_star: Warp::identity(signal.len())?,
            reparameterized: signal.clone(),
            c: cumulative.c,
            j_input,
            j_ust: j_input,
            degenerate: true,
        });
    }
    let tau_star = invert_monotone(&cumulative.f)?;
    let reparameterized = resample(signal, &tau_star);
    let j_ust = cost_functional(&reparameterized);
    Ok(GoraResult {
        tau_star,
        reparameterized,
        c: cumulative.c,
        j_input,
        j_ust,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairAlignment {
    /// Mean distance between the two reparameterized signals.
    pub error: f64,
    pub first: GoraResult,
    pub second: GoraResult,
}

/// Reparameterizes both signals (concurrently) and compares the results.
pub fn align_pair(s1: &Signal, s2: &Signal) -> Result<PairAlignment> {
    s1.same_shape(s2)?;
    let (first, second) = rayon::join(|| reparameterize(s1), || reparameterize(s2));
    let (first, second) = (first?, second?);
    let error = pairwise_error(&first.reparameterized, &second.reparameterized)?;
    Ok(PairAlignment {
        error,
        first,
        second,
    })
}

/// The first integral `(dtau/dt)^2 * g(tau)` along a warp, with `g` read by
/// linear interpolation. Constant along the optimal warp.
pub fn first_integral(g: &[f64], tau: &Warp) -> Vec<f64> {
    let column = Signal::from_column(tau.values().to_vec())
        .expect("a warp always has at least two finite samples");
    derivative(&column)
        .as_slice()
        .iter()
        .zip(tau.values())
        .map(|(slope, &at)| slope * slope * interp_uniform(g, at))
        .collect()
}

fn trapezoid(values: &[f64]) -> f64 {
    let h = 1.0 / (values.len() - 1) as f64;
    values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{polyline_length, uniform_grid};

    fn sup(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn square(len: usize) -> Signal {
        Signal::from_fn(len, 1, |t, _| t * t).unwrap()
    }

    fn helix(len: usize) -> Signal {
        use std::f64::consts::TAU;
        Signal::from_fn(len, 3, |t, d| match d {
            0 => (TAU * t).cos(),
            1 => (TAU * t).sin(),
            _ => t,
        })
        .unwrap()
    }

    #[test]
    fn g_examples() {
        let line = Signal::from_fn(30, 2, |t, d| t * [0.6, 0.8][d]).unwrap();
        assert!(compute_g(&line).iter().all(|g| (g - 1.0).abs() < 1e-12));

        let grid = uniform_grid(101).unwrap();
        let exact: Vec<f64> = grid.values().iter().map(|t| 4.0 * t * t).collect();
        assert!(sup(&compute_g(&square(101)), &exact) <= 1e-10);

        let flat = Signal::from_fn(12, 3, |_, _| 2.0).unwrap();
        assert!(compute_g(&flat).iter().all(|g| g.abs() < 1e-20));
    }

    #[test]
    fn cumulative_of_constant_is_uniform() {
        let out = cumulative_f(&[1.0; 11]).unwrap();
        assert!((out.c - 1.0).abs() < 1e-14);
        assert!(sup(&out.f, uniform_grid(11).unwrap().values()) < 1e-14);
        assert!(!out.degenerate);
    }

    #[test]
    fn cumulative_of_square_speed() {
        let grid = uniform_grid(101).unwrap();
        let g: Vec<f64> = grid.values().iter().map(|t| 4.0 * t * t).collect();
        let out = cumulative_f(&g).unwrap();
        assert!((out.c - 1.0).abs() <= 1e-6);
        let exact: Vec<f64> = grid.values().iter().map(|t| t * t).collect();
        assert!(sup(&out.f, &exact) <= 1e-6);
    }

    #[test]
    fn cumulative_of_zero_falls_back() {
        let out = cumulative_f(&[0.0; 7]).unwrap();
        assert!(out.degenerate);
        assert!((out.c - 1.0).abs() < 1e-14);
        assert!(sup(&out.f, uniform_grid(7).unwrap().values()) < 1e-14);
    }

    #[test]
    fn cumulative_rejects_bad_input() {
        assert!(matches!(
            cumulative_f(&[1.0, f64::NAN, 1.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cumulative_f(&[1.0]),
            Err(Error::InvalidSize { .. })
        ));
    }

    #[test]
    fn cumulative_floor_keeps_f_increasing() {
        let g = [0.0, 0.0, 4.0, 0.0, 0.0, 1.0, 0.0];
        let out = cumulative_f(&g).unwrap();
        assert!(out.f.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invert_uniform_is_identity() {
        let grid = uniform_grid(17).unwrap();
        let w = invert_monotone(grid.values()).unwrap();
        assert!(w.is_identity(1e-15));
    }

    #[test]
    fn invert_square_gives_root() {
        for (len, tol) in [(101, 2e-3), (1001, 2e-5)] {
            let grid = uniform_grid(len).unwrap();
            let f: Vec<f64> = grid.values().iter().map(|t| t * t).collect();
            let tau = invert_monotone(&f).unwrap();
            let root: Vec<f64> = grid.values().iter().map(|t| t.sqrt()).collect();
            let err = sup(tau.values(), &root);
            assert!(err <= tol, "T={len}: {err}");
        }
    }

    #[test]
    fn inverting_twice_round_trips() {
        let w = Warp::random(400, 8, 0.6).unwrap();
        let inv = invert_monotone(w.values()).unwrap();
        let back = invert_monotone(inv.values()).unwrap();
        assert!(sup(back.values(), w.values()) <= 1e-3);
    }

    #[test]
    fn invert_rejects_non_monotone() {
        assert!(matches!(
            invert_monotone(&[0.0, 0.5, 0.4, 1.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            invert_monotone(&[0.0, 0.5, 0.9]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn reparameterize_square() {
        let result = reparameterize(&square(1001)).unwrap();
        let grid = uniform_grid(1001).unwrap();
        let root: Vec<f64> = grid.values().iter().map(|t| t.sqrt()).collect();
        assert!(sup(result.tau_star.values(), &root) <= 1e-3);
        assert!(sup(result.reparameterized.as_slice(), grid.values()) <= 2e-3);
        assert!((result.c - 1.0).abs() <= 1e-4);
        assert!((result.j_input - 4.0 / 3.0).abs() <= 1e-4);
        assert!((result.j_ust - 1.0).abs() <= 1e-3);
        assert!(!result.degenerate);
    }

    #[test]
    fn constant_speed_helix_is_left_alone() {
        let result = reparameterize(&helix(201)).unwrap();
        assert!(result.tau_star.is_identity(1e-6));
    }

    #[test]
    fn endpoints_are_fixed() {
        for seed in 0..10 {
            let x = Signal::from_fn(50, 2, |t, d| ((seed + d) as f64 * 3.1 * t).sin() + t).unwrap();
            let r = reparameterize(&x).unwrap();
            assert_eq!(r.tau_star.values()[0], 0.0);
            assert_eq!(r.tau_star.values()[49], 1.0);
        }
    }

    #[test]
    fn constant_signal_is_degenerate() {
        let flat = Signal::from_fn(20, 2, |_, d| d as f64).unwrap();
        let r = reparameterize(&flat).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.reparameterized, flat);
        assert!(r.tau_star.is_identity(0.0));
        assert!(r.c > 0.0);
    }

    #[test]
    fn optimum_equals_c_squared_on_helix_like_curve() {
        let x = Signal::from_fn(400, 3, |t, d| match d {
            0 => (5.0 * t * t).cos(),
            1 => (5.0 * t * t).sin(),
            _ => t.powi(3),
        })
        .unwrap();
        let r = reparameterize(&x).unwrap();
        assert!((r.j_ust - r.c * r.c).abs() <= 1e-3 * r.c * r.c);
        assert!((r.c - polyline_length(&x)).abs() <= 1e-3 * r.c);
        assert!(r.j_ust <= r.j_input);
    }

    #[test]
    fn first_integral_is_flat_along_optimum() {
        let x = Signal::from_fn(
            300,
            2,
            |t, d| if d == 0 { t.powi(2) } else { (2.0 * t).sin() },
        )
        .unwrap();
        let r = reparameterize(&x).unwrap();
        let q = first_integral(&compute_g(&x), &r.tau_star);
        let inner = &q[1..q.len() - 1];
        let mean = inner.iter().sum::<f64>() / inner.len() as f64;
        assert!((mean - r.c * r.c).abs() <= 1e-2 * r.c * r.c);
        assert!(inner.iter().all(|v| (v - mean).abs() <= 0.05 * mean));
    }

    #[test]
    fn align_identical_signals() {
        let x = helix(64);
        let out = align_pair(&x, &x).unwrap();
        assert_eq!(out.error, 0.0);
        assert_eq!(out.first.tau_star, out.second.tau_star);
    }

    #[test]
    fn align_rejects_mismatched_shapes() {
        assert!(matches!(
            align_pair(&helix(10), &helix(11)),
            Err(Error::IncompatibleSignals { .. })
        ));
    }

    #[test]
    fn align_distinct_shapes_is_positive() {
        let a = helix(80);
        let b = Signal::from_fn(80, 3, |t, d| t * (d + 1) as f64).unwrap();
        assert!(align_pair(&a, &b).unwrap().error > 0.0);
    }

    #[test]
    fn write_dir_layout() {
        let dir = tempfile::tempdir().unwrap();
        let r = reparameterize(&square(21)).unwrap();
        r.write_dir(dir.path()).unwrap();
        let summary: GoraSummary = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("summary.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(summary, r.summary());
        let tau = Warp::read_csv(dir.path().join("tau_star.csv")).unwrap();
        assert_eq!(tau, r.tau_star);
        let x = crate::io::read_csv(dir.path().join("reparameterized.csv")).unwrap();
        assert_eq!(x, r.reparameterized);
    }
}
