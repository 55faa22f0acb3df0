//! Flag definitions for the three subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use earlybias::{TimeConvention, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(
    name = "earlybias",
    version,
    about = "Forecast calibration under observation-time censoring",
    long_about = "Simulates forecasts on time-varying events, evaluates their calibration as \
                  observed at any collection time, and measures the bias introduced by events \
                  that resolved ahead of their scheduled date."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic forecast archive with a perfect forecaster.
    Simulate(SimulateArgs),
    /// Emit the calibration table of an archive at a collection time.
    Calibrate(CalibrateArgs),
    /// Compare unfiltered and filtered calibration and test the shift.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Unitless,
    Iso8601,
}

impl From<Convention> for TimeConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Unitless => TimeConvention::Unitless,
            Convention::Iso8601 => TimeConvention::Iso8601,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of events to generate.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,

    /// RNG seed; identical seeds give byte-identical archives.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// End of the observation window.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,

    /// Occurrence-location sampling interval, as "LO,HI".
    /// Defaults to the whole window.
    #[arg(long, value_parser = parse_pair)]
    pub mu_range: Option<(f64, f64)>,

    /// Occurrence-scale sampling interval, as "LO,HI".
    /// Defaults to 5%..30% of the horizon.
    #[arg(long, value_parser = parse_pair)]
    pub sigma_range: Option<(f64, f64)>,

    /// Comma-separated collection times recorded in the manifest.
    /// Defaults to ten evenly spaced times up to the horizon.
    #[arg(long, value_parser = parse_list)]
    pub snapshot_times: Option<std::vec::Vec<f64>>,

    /// Log-odds shift applied to every forecast; 0 keeps the forecaster
    /// perfect.
    #[arg(long, default_value_t = 0.0)]
    pub bias: f64,

    /// Output archive path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Input archive.
    #[arg(long)]
    pub input: PathBuf,

    /// Collection time; a real number, or an RFC 3339 timestamp under
    /// --time-convention iso8601.
    #[arg(long)]
    pub collection_time: String,

    /// Number of equal-width forecast bins.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,

    /// Exclude records scheduled to resolve after the collection time.
    #[arg(
        long,
        conflicts_with = "no_filter",
        required_unless_present = "no_filter"
    )]
    pub filter: bool,

    /// Keep every resolved record, including surprisingly-early ones.
    #[arg(long)]
    pub no_filter: bool,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, value_enum, default_value_t = Convention::Unitless)]
    pub time_convention: Convention,

    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Input archive.
    #[arg(long)]
    pub input: PathBuf,

    /// Collection time; a real number, or an RFC 3339 timestamp under
    /// --time-convention iso8601.
    #[arg(long)]
    pub collection_time: String,

    /// Permutation resamples for the significance test.
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,

    /// RNG seed for the permutation test.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Number of equal-width forecast bins for the two tables.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, value_enum, default_value_t = Convention::Unitless)]
    pub time_convention: Convention,

    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"LO,HI\", got {s:?}"));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {:?}", parts[0]))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {:?}", parts[1]))?;
    Ok((lo, hi))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect()
}
