//! Signal alignment by globally optimal temporal reparameterization (GORA),
//! with exact DTW and FastDTW baselines and an experiment harness comparing
//! them.
//!
//! Every signal is a `T x n` matrix sampled on the uniform grid over
//! `[0, 1]`. [`gora::reparameterize`] maps it to its universal standard
//! timescale: the constant-speed parameterization that minimizes
//! `integral |dX/dt|^2 dt` over all monotone warps of the time axis. Two
//! signals tracing the same curve at different speeds then compare sample by
//! sample with [`signal::pairwise_error`].

pub mod dtw;
pub mod error;
pub mod experiment;
pub mod gora;
pub mod io;
pub mod signal;
pub mod synth;
pub mod trg;

pub use dtw::{dtw_full, fastdtw, normalized_error, DtwAlignment, WarpingPath, Window};
pub use error::{Error, Result};
pub use experiment::{
    comparison_experiment, emit_report, optimality_experiment, ExperimentConfig, ExperimentReport,
    Method,
};
pub use gora::{align_pair, reparameterize, GoraResult};
pub use io::{read_csv, write_csv};
pub use signal::{pairwise_error, resample, Signal, TimeGrid};
pub use synth::{generate_template, warped_pair, SignalKind, TemplateSpec};
pub use trg::Warp;
