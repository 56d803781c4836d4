//! `gora`: generate synthetic signals, align pairs, verify optimality and run
//! the GORA vs DTW/FastDTW benchmark.
//!
//! Exit codes: 0 success, 1 verification threshold missed, 2 bad input or
//! configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gora_core::experiment::{
    comparison_inputs, trial_seed, OptimalityStats, PAIR_SLOT, TEMPLATE_SLOT,
};
use gora_core::synth::DEFAULT_SMOOTHNESS;
use gora_core::{
    align_pair, comparison_experiment, dtw_full, emit_report, fastdtw, optimality_experiment,
    read_csv, write_csv, ExperimentConfig, SignalKind,
};
use serde_json::json;

/// Percentage every `T >= VERIFY_MIN_T` row of `verify` has to reach.
const VERIFY_THRESHOLD: f64 = 95.0;
const VERIFY_MIN_T: usize = 100;

#[derive(Parser)]
#[command(
    name = "gora",
    version,
    about = "Signal alignment by optimal reparameterization"
)]
struct Cli {
    /// Master seed for generated signals and warps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write templates and warped pairs as CSV plus a JSON manifest.
    Gen(GenArgs),
    /// Print the alignment error between two CSV signals.
    Align(AlignArgs),
    /// Check how often the reparameterized cost is below the input cost.
    Verify(VerifyArgs),
    /// Run the error and run-time comparison described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "trajectory3d")]
    kind: SignalKind,
    /// Number of samples.
    #[arg(long = "T", default_value_t = 100)]
    len: usize,
    /// Dimension (always 3 for trajectories).
    #[arg(long)]
    n: Option<usize>,
    /// Number of templates, each with one warped pair.
    #[arg(long, default_value_t = 1)]
    pairs: usize,
    #[arg(long, default_value_t = DEFAULT_SMOOTHNESS)]
    smoothness: usize,
    #[arg(long, default_value_t = 0.5)]
    roughness: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignMethod {
    Gora,
    Dtw,
    Fastdtw,
}

#[derive(Args)]
struct AlignArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long, value_enum, default_value = "gora")]
    method: AlignMethod,
    /// FastDTW radius (default 1).
    #[arg(long)]
    radius: Option<usize>,
    /// Directory for warps (gora) or the warping path (dtw, fastdtw).
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trials per T, rounded up to a whole number of templates.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Warps per template.
    #[arg(long, default_value_t = 10)]
    warps: usize,
    /// Comma-separated sample counts.
    #[arg(long = "T", value_delimiter = ',')]
    t_values: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.5)]
    roughness: f64,
    /// Fourier modes per template dimension.
    #[arg(long, default_value_t = DEFAULT_SMOOTHNESS)]
    smoothness: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    match &cli.command {
        Command::Gen(args) => gen(cli, args),
        Command::Align(args) => align(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Bench(args) => bench(cli, args),
    }
}

fn progress(cli: &Cli, message: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", message.as_ref());
    }
}

fn gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode> {
    let dim = match (args.kind, args.n) {
        (SignalKind::Highdim, None) => return Err(anyhow!("--n is required for highdim signals")),
        (_, Some(n)) => n,
        (SignalKind::Trajectory3d, None) => 3,
    };
    let mut config = ExperimentConfig {
        t_values: vec![args.len],
        roughness: args.roughness,
        master_seed: cli.seed.unwrap_or(0),
        ..ExperimentConfig::default()
    };
    config.signal.kind = args.kind;
    config.signal.n = dim;
    config.signal.smoothness = args.smoothness;
    config.validate()?;

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut entries = Vec::with_capacity(args.pairs);
    for k in 0..args.pairs {
        let (template, a, b) = comparison_inputs(&config, args.len, k)?;
        let files = [
            format!("template_{k}.csv"),
            format!("pair_{k}_a.csv"),
            format!("pair_{k}_b.csv"),
        ];
        for (signal, name) in [&template, &a, &b].into_iter().zip(&files) {
            write_csv(signal, dir.join(name))?;
        }
        let spec = config.template_spec(
            args.len,
            trial_seed(config.master_seed, args.len, k, TEMPLATE_SLOT),
        );
        entries.push(json!({
            "index": k,
            "template": spec,
            "pair_seed": trial_seed(config.master_seed, args.len, k, PAIR_SLOT),
            "files": files,
        }));
    }
    let manifest = json!({
        "master_seed": config.master_seed,
        "roughness": config.roughness,
        "pairs": entries,
    });
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    progress(
        cli,
        format!("wrote {} pair(s) to {}", args.pairs, dir.display()),
    );
    Ok(ExitCode::SUCCESS)
}

fn align(cli: &Cli, args: &AlignArgs) -> Result<ExitCode> {
    let first = read_csv(&args.first)?;
    let second = read_csv(&args.second)?;
    let error = match args.method {
        AlignMethod::Gora => {
            let result = align_pair(&first, &second)?;
            if let Some(dir) = &args.emit {
                result.first.write_dir(dir.join("first"))?;
                result.second.write_dir(dir.join("second"))?;
            }
            result.error
        }
        AlignMethod::Dtw | AlignMethod::Fastdtw => {
            let alignment = if let AlignMethod::Fastdtw = args.method {
                let radius = args.radius.unwrap_or_else(|| {
                    progress(cli, "notice: no --radius given, using 1");
                    1
                });
                fastdtw(&first, &second, radius)?
            } else {
                dtw_full(&first, &second)?
            };
            if let Some(dir) = &args.emit {
                emit_path(dir, &alignment.path)?;
            }
            alignment.normalized_error()
        }
    };
    println!("{error}");
    Ok(ExitCode::SUCCESS)
}

fn emit_path(dir: &Path, path: &gora_core::WarpingPath) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    path.write_csv(dir.join("path.csv"))?;
    Ok(())
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode> {
    if args.warps == 0 {
        return Err(anyhow!("--warps must be at least 1"));
    }
    let mut config = ExperimentConfig {
        templates_per_t: args.trials.div_ceil(args.warps),
        warps_per_template: args.warps,
        roughness: args.roughness,
        master_seed: cli.seed.unwrap_or(0),
        timing: false,
        ..ExperimentConfig::default()
    };
    config.signal.smoothness = args.smoothness;
    if let Some(t_values) = &args.t_values {
        config.t_values = t_values.clone();
    }
    progress(
        cli,
        format!(
            "{} templates x {} warps per T",
            config.templates_per_t, config.warps_per_template
        ),
    );
    let report = optimality_experiment(&config)?;
    println!("T\ttrials\tlower\tpercentage");
    for row in &report.optimality {
        println!(
            "{}\t{}\t{}\t{}",
            row.t, row.trials, row.lower, row.percentage
        );
    }
    if let Some(dir) = &cli.out {
        emit_report(&report, dir)?;
        progress(cli, format!("wrote report to {}", dir.display()));
    }
    let failing = below_threshold(&report.optimality);
    if failing.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("below {VERIFY_THRESHOLD}% at T = {failing:?}");
        Ok(ExitCode::from(1))
    }
}

/// `T` values of rows that count towards the threshold and miss it.
fn below_threshold(rows: &[OptimalityStats]) -> Vec<usize> {
    rows.iter()
        .filter(|r| r.t >= VERIFY_MIN_T && r.percentage < VERIFY_THRESHOLD)
        .map(|r| r.t)
        .collect()
}

fn bench(cli: &Cli, args: &BenchArgs) -> Result<ExitCode> {
    let mut config = ExperimentConfig::read(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = Some(out.clone());
    }
    let dir = config
        .output_dir
        .clone()
        .ok_or_else(|| anyhow!("no output directory: pass --out or set output_dir"))?;
    progress(
        cli,
        format!(
            "{} methods x {} T values x {} pairs",
            config.methods.len(),
            config.t_values.len(),
            config.templates_per_t
        ),
    );
    let report = comparison_experiment(&config)?;
    emit_report(&report, &dir)?;
    println!("T\tmethod\tmean_error\tstd_error\tmean_runtime_s");
    for row in &report.comparison {
        let runtime = row
            .mean_runtime_s
            .map_or_else(|| "-".to_string(), |r| r.to_string());
        println!(
            "{}\t{}\t{}\t{}\t{}",
            row.t, row.method, row.mean_error, row.std_error, runtime
        );
    }
    progress(cli, format!("wrote report to {}", dir.display()));
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: usize, percentage: f64) -> OptimalityStats {
        OptimalityStats {
            t,
            trials: 100,
            lower: percentage as usize,
            percentage,
        }
    }

    #[test]
    fn threshold_only_applies_from_t_100() {
        let rows = [
            row(20, 60.0),
            row(90, 94.0),
            row(100, 95.0),
            row(150, 100.0),
        ];
        assert!(below_threshold(&rows).is_empty());
        let rows = [
            row(20, 100.0),
            row(100, 94.0),
            row(150, 96.0),
            row(200, 90.0),
        ];
        assert_eq!(below_threshold(&rows), vec![100, 200]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
