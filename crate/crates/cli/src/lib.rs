//! Command-line front end: parses a run configuration, executes the
//! experiment on a bounded thread pool and writes CSV or JSON.

pub mod config;
pub mod emit;
pub mod run;

use clap::Parser;
use config::{parse_file_text, Command, RunConfig, KEYS};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "INTRINSIC_METRICS_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<intrinsic_metrics::Error> for CliError {
    fn from(e: intrinsic_metrics::Error) -> Self {
        match e {
            intrinsic_metrics::Error::Parameter(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "intrinsic-metrics", version, about = "Intrinsic volume metric experiments", allow_negative_numbers = true)]
pub struct Args {
    /// validate, theorem1, rate, optimize, constants or appendixB.
    pub command: String,
    /// key=value settings file, or a `.spec.json` sidecar from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Ambient dimension.
    #[arg(long)]
    pub n: Option<String>,
    /// Projection dimension.
    #[arg(long)]
    pub j: Option<String>,
    /// Comma-separated vertex counts.
    #[arg(long = "N")]
    pub n_grid: Option<String>,
    /// Replications per grid value.
    #[arg(long)]
    pub reps: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Beta exponent, for rate, constants and appendixB.
    #[arg(long)]
    pub beta: Option<String>,
    /// Third dimension of the Chern constant.
    #[arg(long)]
    pub l: Option<String>,
    /// Proposals for optimize.
    #[arg(long)]
    pub budget: Option<String>,
    /// Random subspaces per metric estimate.
    #[arg(long)]
    pub subspaces: Option<String>,
    /// Directions per volume estimate.
    #[arg(long = "volume_samples")]
    pub volume_samples: Option<String>,
    #[arg(long = "exact_low_dim")]
    pub exact_low_dim: Option<String>,
    /// asymptotic, empirical or none.
    #[arg(long)]
    pub scaling: Option<String>,
    /// Polytopes per empirical scaling estimate.
    #[arg(long = "scaling_replicates")]
    pub scaling_replicates: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl Args {
    fn flag_layer(&self) -> BTreeMap<String, String> {
        let values = [
            &self.n,
            &self.j,
            &self.n_grid,
            &self.reps,
            &self.seed,
            &self.beta,
            &self.l,
            &self.budget,
            &self.subspaces,
            &self.volume_samples,
            &self.exact_low_dim,
            &self.scaling,
            &self.scaling_replicates,
            &self.output,
            &self.format,
        ];
        KEYS.iter()
            .zip(values)
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

/// Reads a settings file: plain `key=value` text, or the `config` object of
/// a sidecar, whose command must match.
fn file_layer(path: &PathBuf, command: Command) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    if !text.trim_start().starts_with('{') {
        return parse_file_text(&text);
    }
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: not a valid sidecar ({e})", path.display())))?;
    if let Some(c) = doc.get("command").and_then(|c| c.as_str()) {
        if c != command.name() {
            return Err(CliError::Config(format!(
                "{} was written by `{c}`, not `{command}`",
                path.display()
            )));
        }
    }
    let pairs: BTreeMap<String, String> = doc
        .get("config")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| CliError::Config(format!("{}: malformed `config` object ({e})", path.display())))?
        .ok_or_else(|| CliError::Config(format!("{}: sidecar has no `config` object", path.display())))?;
    Ok(pairs)
}

/// Builds the run configuration from parsed arguments.
pub fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let command: Command = args.command.parse().map_err(CliError::Config)?;
    let mut layers = Vec::new();
    if let Some(path) = &args.config {
        layers.push(file_layer(path, command)?);
    }
    layers.push(args.flag_layer());
    RunConfig::from_layers(command, &layers)
}

/// Worker count from [`THREADS_ENV`]; `None` means hardware parallelism.
pub fn thread_cap(raw: Option<&str>) -> Result<Option<usize>, CliError> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
            Ok(k) => Ok(Some(k)),
        },
    }
}

/// Runs a resolved configuration on a pool of the given size and returns
/// what should be printed.
pub fn run_with_threads(rc: &RunConfig, threads: Option<usize>) -> Result<String, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker pool: {e}")))?;
    let out = pool.install(|| run::execute(rc))?;
    emit::emit(&out, rc)
}

/// Full pipeline from argument list to printed text.
pub fn run_args<I, T>(argv: I, threads_env: Option<&str>) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| CliError::Config(e.to_string()))?;
    let rc = resolve(&args)?;
    run_with_threads(&rc, thread_cap(threads_env)?)
}
