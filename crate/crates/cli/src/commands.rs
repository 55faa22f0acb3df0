//! Implementations of the three subcommands.

use std::fmt;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use earlybias::{
    bin_forecasts, calibration_shift, curve_to_table, distort_dataset, filter_scheduled,
    parse_archive, parse_time_value, raw_frequency_shift, sample_events, shift_significance,
    surprisingly_early_subset, to_observed, write_archive, ArchiveSummary, BinningScheme,
    ObservedDataset, SimulationConfig, TableRow, TimeConvention,
};
use serde_json::json;

use crate::args::{CalibrateArgs, Cli, Command, CompareArgs, Format, SimulateArgs};
use crate::manifest::RunManifest;
use crate::output::{
    render_compare_csv, render_compare_json, render_curve_csv, render_curve_json, CompareReport,
    CompareSummary, CurveDocument,
};

#[derive(Debug)]
pub enum CliError {
    Core(earlybias::Error),
    Io(std::io::Error),
    Usage(String),
}

impl CliError {
    /// 1 for validation and usage problems, 2 for i/o failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Core(e) if e.is_io() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
            CliError::Usage(m) => m.fmt(f),
        }
    }
}

impl From<earlybias::Error> for CliError {
    fn from(e: earlybias::Error) -> Self {
        CliError::Core(e)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Calibrate(args) => calibrate(args),
        Command::Compare(args) => compare(args),
    }
}

fn open_input(path: &Path) -> Result<BufReader<fs::File>, CliError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(CliError::Io)
}

/// Write the payload, and a manifest sidecar next to it when the payload
/// goes to a file.
fn emit(out: Option<&PathBuf>, bytes: &[u8], manifest: &RunManifest) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(CliError::Io)?;
            fs::write(RunManifest::sidecar_path(path), manifest.render()).map_err(CliError::Io)?;
        }
        None => std::io::stdout().write_all(bytes).map_err(CliError::Io)?,
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut config = SimulationConfig::for_horizon(args.n, args.horizon, args.seed);
    if let Some(r) = args.mu_range {
        config.mu_range = r;
    }
    if let Some(r) = args.sigma_range {
        config.sigma_range = r;
    }
    if let Some(t) = args.snapshot_times {
        config.snapshot_times = t;
    }

    let mut dataset = sample_events(&config)?;
    if args.bias != 0.0 {
        dataset = distort_dataset(&dataset, args.bias);
    }

    let mut bytes = Vec::new();
    write_archive(&dataset.to_archive_records(), &mut bytes)?;

    let mut manifest = RunManifest::new(
        "simulate",
        json!({
            "n": config.n_events,
            "seed": config.seed,
            "horizon": config.horizon,
            "mu_range": config.mu_range,
            "sigma_range": config.sigma_range,
            "snapshot_times": config.snapshot_times,
            "bias": args.bias,
            "time_convention": "unitless",
        }),
    );
    manifest.seed = Some(config.seed);
    manifest.output = Some(args.out.clone());

    emit(Some(&args.out), &bytes, &manifest)?;
    eprintln!(
        "wrote {} records to {}",
        config.n_events,
        args.out.display()
    );
    Ok(())
}

struct LoadedArchive {
    unfiltered: ObservedDataset,
    summary: ArchiveSummary,
    collection_time: f64,
}

fn load_observed(
    input: &Path,
    collection_time: &str,
    convention: TimeConvention,
) -> Result<LoadedArchive, CliError> {
    let t_c = parse_time_value(collection_time, convention)
        .map_err(|e| CliError::Usage(format!("--collection-time: {e}")))?;
    let records = parse_archive(open_input(input)?, convention)?;
    let summary = ArchiveSummary::compute(&records, t_c);
    let unfiltered = to_observed(&records, t_c)?;
    if summary.n_early_negatives_flagged > 0 {
        eprintln!(
            "note: {} event(s) resolved negative before their scheduled date",
            summary.n_early_negatives_flagged
        );
    }
    Ok(LoadedArchive {
        unfiltered,
        summary,
        collection_time: t_c,
    })
}

fn render_rows(rows: &[TableRow], format: Format) -> Result<Vec<u8>, CliError> {
    Ok(match format {
        Format::Csv => render_curve_csv(rows)?,
        Format::Json => render_curve_json(rows),
    })
}

fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let convention: TimeConvention = args.time_convention.into();
    let loaded = load_observed(&args.input, &args.collection_time, convention)?;
    let scheme = BinningScheme::new(args.bins)?;

    let view = if args.filter {
        let filtered = filter_scheduled(&loaded.unfiltered);
        eprintln!(
            "filtered out {} surprisingly-early record(s) across {} event(s)",
            loaded.unfiltered.len() - filtered.len(),
            loaded.summary.n_events_scheduled_after_collection
        );
        filtered
    } else {
        loaded.unfiltered
    };

    let curve = bin_forecasts(&view, scheme)?;
    let rows = curve_to_table(&curve);
    let bytes = render_rows(&rows, args.format)?;

    let mut manifest = RunManifest::new(
        "calibrate",
        json!({
            "input": args.input,
            "collection_time_flag": args.collection_time,
            "collection_time": loaded.collection_time,
            "bins": args.bins,
            "filter": args.filter,
            "format": format!("{:?}", args.format).to_lowercase(),
            "time_convention": format!("{:?}", args.time_convention).to_lowercase(),
        }),
    );
    manifest.input = Some(args.input.clone());
    manifest.output = args.out.clone();

    emit(args.out.as_ref(), &bytes, &manifest)
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let convention: TimeConvention = args.time_convention.into();
    let loaded = load_observed(&args.input, &args.collection_time, convention)?;
    let scheme = BinningScheme::new(args.bins)?;

    let unfiltered = loaded.unfiltered;
    let filtered = filter_scheduled(&unfiltered);
    let excluded = surprisingly_early_subset(&unfiltered)?;
    eprintln!(
        "excluded {} record(s) across {} event(s) scheduled after the collection time",
        excluded.len(),
        loaded.summary.n_events_scheduled_after_collection
    );

    let residual_shift = calibration_shift(&unfiltered, &filtered)?;
    let raw_frequency_difference = raw_frequency_shift(&unfiltered, &filtered)?;
    let significance = if excluded.is_empty() {
        None
    } else {
        Some(shift_significance(&unfiltered, args.resamples, args.seed)?)
    };

    let report = CompareReport {
        summary: CompareSummary {
            collection_time: loaded.collection_time,
            n_unfiltered: unfiltered.len(),
            n_filtered: filtered.len(),
            excluded_count: excluded.len(),
            raw_frequency_difference,
            residual_shift,
            p_value: significance.as_ref().map(|s| s.p_value),
            n_resamples: significance.as_ref().map(|s| s.n_resamples),
            seed: significance.as_ref().map(|s| s.seed),
        },
        unfiltered: CurveDocument {
            rows: curve_to_table(&bin_forecasts(&unfiltered, scheme)?),
        },
        filtered: CurveDocument {
            rows: curve_to_table(&bin_forecasts(&filtered, scheme)?),
        },
    };

    let bytes = match args.format {
        Format::Csv => render_compare_csv(&report)?,
        Format::Json => render_compare_json(&report),
    };

    let mut manifest = RunManifest::new(
        "compare",
        json!({
            "input": args.input,
            "collection_time_flag": args.collection_time,
            "collection_time": loaded.collection_time,
            "resamples": args.resamples,
            "seed": args.seed,
            "bins": args.bins,
            "format": format!("{:?}", args.format).to_lowercase(),
            "time_convention": format!("{:?}", args.time_convention).to_lowercase(),
        }),
    );
    manifest.seed = Some(args.seed);
    manifest.input = Some(args.input.clone());
    manifest.output = args.out.clone();

    emit(args.out.as_ref(), &bytes, &manifest)
}
