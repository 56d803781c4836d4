//! Benchmark orchestration: the optimality-percentage experiment and the
//! GORA vs DTW/FastDTW accuracy and run-time comparison.
//!
//! Every random draw is seeded from `(master_seed, T, template, slot)`, so a
//! report's contents do not depend on thread count or scheduling. Timing runs
//! in a separate sequential pass after all errors have been computed.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::{dtw_full, fastdtw};
use crate::error::{Error, Result};
use crate::gora::{align_pair, reparameterize};
use crate::signal::{resample, Signal};
use crate::synth::{generate_template, warped_pair, SignalKind, TemplateSpec, DEFAULT_SMOOTHNESS};
use crate::trg::Warp;

/// Relative slack in the `j_ust <= j_input` comparison.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;

/// Alignment methods under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Gora,
    Dtw,
    FastDtw { radius: usize },
}

impl Method {
    /// GORA, exact DTW and FastDTW with radii 1, 5 and 20.
    pub fn standard_set() -> Vec<Method> {
        vec![
            Method::Gora,
            Method::Dtw,
            Method::FastDtw { radius: 1 },
            Method::FastDtw { radius: 5 },
            Method::FastDtw { radius: 20 },
        ]
    }

    /// The method's error between two equally shaped signals.
    pub fn error(self, s1: &Signal, s2: &Signal) -> Result<f64> {
        match self {
            Method::Gora => Ok(align_pair(s1, s2)?.error),
            Method::Dtw => Ok(dtw_full(s1, s2)?.normalized_error()),
            Method::FastDtw { radius } => Ok(fastdtw(s1, s2, radius)?.normalized_error()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gora => f.write_str("gora"),
            Method::Dtw => f.write_str("dtw"),
            Method::FastDtw { radius } => write!(f, "fastdtw:r={radius}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gora" => Ok(Method::Gora),
            "dtw" => Ok(Method::Dtw),
            _ => s
                .strip_prefix("fastdtw:r=")
                .and_then(|r| r.parse().ok())
                .map(|radius| Method::FastDtw { radius })
                .ok_or_else(|| Error::Config(format!("unknown method {s:?}"))),
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

/// Shape of the generated templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub kind: SignalKind,
    #[serde(default = "default_dim")]
    pub n: usize,
    #[serde(default = "default_smoothness")]
    pub smoothness: usize,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            kind: SignalKind::Trajectory3d,
            n: 3,
            smoothness: DEFAULT_SMOOTHNESS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "T_values", default = "default_t_values")]
    pub t_values: Vec<usize>,
    #[serde(rename = "templates_per_T", default = "default_count")]
    pub templates_per_t: usize,
    #[serde(default = "default_count")]
    pub warps_per_template: usize,
    #[serde(default = "Method::standard_set")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default = "default_roughness")]
    pub roughness: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub timing: bool,
}

fn default_t_values() -> Vec<usize> {
    (20..=150).step_by(10).collect()
}

fn default_count() -> usize {
    10
}

fn default_dim() -> usize {
    3
}

fn default_smoothness() -> usize {
    DEFAULT_SMOOTHNESS
}

fn default_roughness() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            t_values: default_t_values(),
            templates_per_t: default_count(),
            warps_per_template: default_count(),
            methods: Method::standard_set(),
            signal: SignalConfig::default(),
            roughness: default_roughness(),
            master_seed: 0,
            output_dir: None,
            timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::Config("T_values must not be empty".into()));
        }
        if self.templates_per_t == 0 || self.warps_per_template == 0 {
            return Err(Error::Config("trial counts must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        if !self.roughness.is_finite() || self.roughness < 0.0 {
            return Err(Error::Config(format!(
                "invalid roughness {}",
                self.roughness
            )));
        }
        for &t in &self.t_values {
            self.template_spec(t, 0).validate()?;
        }
        Ok(())
    }

    /// Template spec for length `len` drawn with `seed`.
    pub fn template_spec(&self, len: usize, seed: u64) -> TemplateSpec {
        TemplateSpec {
            kind: self.signal.kind,
            len,
            n: self.signal.n,
            seed,
            smoothness: self.signal.smoothness,
        }
    }
}

/// Error and run-time statistics of one method at one `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    #[serde(rename = "T")]
    pub t: usize,
    pub method: Method,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_runtime_s: Option<f64>,
    pub std_runtime_s: Option<f64>,
}

/// Share of trials whose reparameterized cost does not exceed the input's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityStats {
    #[serde(rename = "T")]
    pub t: usize,
    pub trials: usize,
    pub lower: usize,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityTrial {
    #[serde(rename = "T")]
    pub t: usize,
    pub template: usize,
    pub warp: usize,
    pub j_input: f64,
    pub j_ust: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub comparison: Vec<MethodStats>,
    pub optimality: Vec<OptimalityStats>,
    pub optimality_trials: Vec<OptimalityTrial>,
}

/// Seed for one random draw, mixed from all of its coordinates.
pub fn trial_seed(master: u64, len: usize, template: usize, slot: u64) -> u64 {
    [len as u64, template as u64, slot]
        .iter()
        .fold(splitmix64(master), |acc, &v| {
            splitmix64(acc ^ splitmix64(v))
        })
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// [`trial_seed`] slot of a template draw.
pub const TEMPLATE_SLOT: u64 = 0;
/// [`trial_seed`] slot of a comparison pair's warps. Optimality warp `w` uses
/// slot `w + 1`.
pub const PAIR_SLOT: u64 = 1;

fn template_for(config: &ExperimentConfig, len: usize, index: usize) -> Result<Signal> {
    let seed = trial_seed(config.master_seed, len, index, TEMPLATE_SLOT);
    generate_template(&config.template_spec(len, seed))
}

/// Template `index` at length `len` and the warped pair built from it, as
/// used by [`comparison_experiment`].
pub fn comparison_inputs(
    config: &ExperimentConfig,
    len: usize,
    index: usize,
) -> Result<(Signal, Signal, Signal)> {
    let template = template_for(config, len, index)?;
    let (a, b) = warped_pair(
        &template,
        trial_seed(config.master_seed, len, index, PAIR_SLOT),
        config.roughness,
    )?;
    Ok((template, a, b))
}

/// For every `T`, template and warp: reparameterize the warped template and
/// record whether `j_ust <= j_input`.
pub fn optimality_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut optimality = Vec::new();
    let mut optimality_trials = Vec::new();
    for &len in &config.t_values {
        let per_template: Vec<Vec<OptimalityTrial>> = (0..config.templates_per_t)
            .into_par_iter()
            .map(|k| {
                let template = template_for(config, len, k)?;
                (0..config.warps_per_template)
                    .map(|w| {
                        let seed = trial_seed(config.master_seed, len, k, w as u64 + 1);
                        let warp = Warp::random(len, seed, config.roughness)?;
                        let result = reparameterize(&resample(&template, &warp))?;
                        Ok(OptimalityTrial {
                            t: len,
                            template: k,
                            warp: w,
                            j_input: result.j_input,
                            j_ust: result.j_ust,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let trials: Vec<OptimalityTrial> = per_template.into_iter().flatten().collect();
        let lower = trials
            .iter()
            .filter(|t| t.j_ust <= t.j_input * (1.0 + OPTIMALITY_TOLERANCE))
            .count();
        optimality.push(OptimalityStats {
            t: len,
            trials: trials.len(),
            lower,
            percentage: 100.0 * lower as f64 / trials.len() as f64,
        });
        optimality_trials.extend(trials);
    }
    Ok(ExperimentReport {
        config: config.clone(),
        comparison: Vec::new(),
        optimality,
        optimality_trials,
    })
}

/// For every `T` and template: warp the template twice and measure each
/// method's error (and, if enabled, its run time) on the pair.
pub fn comparison_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut comparison = Vec::new();
    for &len in &config.t_values {
        let pairs: Vec<(Signal, Signal)> = (0..config.templates_per_t)
            .into_par_iter()
            .map(|k| comparison_inputs(config, len, k).map(|(_, a, b)| (a, b)))
            .collect::<Result<_>>()?;

        for &method in &config.methods {
            let errors: Vec<f64> = pairs
                .par_iter()
                .map(|(a, b)| method.error(a, b))
                .collect::<Result<_>>()?;
            let (mean_error, std_error) = mean_std(&errors);
            let (mean_runtime_s, std_runtime_s) = if config.timing {
                let times: Vec<f64> = pairs
                    .iter()
                    .map(|(a, b)| time_operation(|| method.error(a, b)))
                    .collect();
                let (m, s) = mean_std(&times);
                (Some(m), Some(s))
            } else {
                (None, None)
            };
            comparison.push(MethodStats {
                t: len,
                method,
                trials: errors.len(),
                mean_error,
                std_error,
                mean_runtime_s,
                std_runtime_s,
            });
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        comparison,
        optimality: Vec::new(),
        optimality_trials: Vec::new(),
    })
}

/// Median wall-clock seconds of three runs, after one warm-up run.
pub fn time_operation<R>(mut op: impl FnMut() -> R) -> f64 {
    std::hint::black_box(op());
    let mut samples = [0.0; 3];
    for s in &mut samples {
        let start = Instant::now();
        std::hint::black_box(op());
        *s = start.elapsed().as_secs_f64();
    }
    samples.sort_by(f64::total_cmp);
    samples[1]
}

/// Mean and per-trial sample standard deviation (zero for a single trial).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Writes `fig2a.csv`, `fig_error.csv`, `fig_runtime.csv` (columns
/// `T,method,mean,std`), `trials.csv`, `report.json` and `config.json`.
pub fn emit_report(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;

    let mut fig2a = String::from("T,method,mean,std\n");
    for row in &report.optimality {
        let p = row.percentage / 100.0;
        let std = 100.0 * (p * (1.0 - p)).sqrt();
        fig2a.push_str(&format!("{},gora,{},{}\n", row.t, row.percentage, std));
    }
    fs::write(dir.join("fig2a.csv"), fig2a)?;

    let mut errors = String::from("T,method,mean,std\n");
    let mut runtimes = String::from("T,method,mean,std\n");
    for row in &report.comparison {
        errors.push_str(&format!(
            "{},{},{},{}\n",
            row.t, row.method, row.mean_error, row.std_error
        ));
        if let (Some(m), Some(s)) = (row.mean_runtime_s, row.std_runtime_s) {
            runtimes.push_str(&format!("{},{},{},{}\n", row.t, row.method, m, s));
        }
    }
    fs::write(dir.join("fig_error.csv"), errors)?;
    fs::write(dir.join("fig_runtime.csv"), runtimes)?;

    let mut trials = String::from("T,template,warp,j_input,j_ust\n");
    for t in &report.optimality_trials {
        trials.push_str(&format!(
            "{},{},{},{},{}\n",
            t.t, t.template, t.warp, t.j_input, t.j_ust
        ));
    }
    fs::write(dir.join("trials.csv"), trials)?;

    fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(report)? + "\n",
    )?;
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&report.config)? + "\n",
    )?;
    Ok(())
}
