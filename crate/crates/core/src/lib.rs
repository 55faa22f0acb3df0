//! Forecast datasets that contain time-varying events suffer a quiet
//! selection effect: at any collection time, the events that resolved
//! ahead of their scheduled date are visible while their slower
//! counterparts are still censored, so observed outcome frequencies run
//! ahead of even perfectly calibrated forecasts. This crate simulates
//! the effect, measures it on real or synthetic archives, and removes it
//! by restricting analysis to records whose scheduled resolution date
//! precedes the collection time.
//!
//! The pieces, bottom to top:
//!
//! * [`model`] — events, forecasts, and the classification rule deciding
//!   what an observer sees at a collection time.
//! * [`simulate`] — seeded synthetic datasets with a perfect forecaster,
//!   plus optional injected miscalibration.
//! * [`censor`] — observed datasets, the scheduled-resolution filter,
//!   and the surprisingly-early subset.
//! * [`calibration`] — reliability curves and residuals.
//! * [`shift`] — the unfiltered-vs-filtered calibration shift and its
//!   permutation significance test.
//! * [`archive`] — the interchange file format and its ingestion rules.

pub mod archive;
pub mod calibration;
pub mod censor;
pub mod error;
pub mod math;
pub mod model;
pub mod shift;
pub mod simulate;

pub use archive::{
    parse_archive, parse_time_value, to_observed, write_archive, ArchiveOutcome, ArchiveRecord,
    ArchiveSummary, TimeConvention,
};
pub use calibration::{
    bin_forecasts, curve_from_table, curve_to_table, mean_residual, positive_frequency,
    residual_standard_error, BinStats, BinningScheme, CalibrationBin, CalibrationCurve, TableRow,
};
pub use censor::{
    filter_scheduled, observe, surprisingly_early_subset, ObservedDataset, ObservedRecord,
    Provenance, ResolvedOutcome,
};
pub use error::{Error, Result};
pub use model::{
    classify_observation, EventRecord, ForecastRecord, Horizon, ObservedOutcome, OccurrenceModel,
    Snapshot, TimePoint,
};
pub use shift::{
    calibration_shift, raw_frequency_shift, shift_significance, shift_significance_stratified,
    ShiftResult,
};
pub use simulate::{
    distort_dataset, distort_forecast, forecast_at, generate_snapshots, sample_events,
    SimulationConfig, SyntheticDataset, DEFAULT_SEED,
};
