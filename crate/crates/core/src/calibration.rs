//! Reliability estimation: bin forecasts, compare them with empirical
//! outcome frequencies, and emit the table behind a calibration plot.

use serde::{Deserialize, Serialize};

use crate::censor::ObservedDataset;
use crate::error::{Error, Result};
use crate::math;

/// Equal-width partition of [0, 1] into `n_bins` bins; the last bin is
/// closed on both ends so every probability maps to exactly one bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningScheme {
    pub n_bins: usize,
}

impl Default for BinningScheme {
    fn default() -> Self {
        BinningScheme { n_bins: 20 }
    }
}

impl BinningScheme {
    pub fn new(n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidConfig("n_bins must be at least 1".into()));
        }
        Ok(BinningScheme { n_bins })
    }

    /// Index of the bin `p` falls into; `p = 1` lands in the last bin.
    pub fn bin_index(&self, p: f64) -> usize {
        ((p * self.n_bins as f64) as usize).min(self.n_bins - 1)
    }

    /// `[low, high)` edges of bin `i` (the last bin is `[low, 1]`).
    pub fn edges(&self, i: usize) -> (f64, f64) {
        let n = self.n_bins as f64;
        (i as f64 / n, (i + 1) as f64 / n)
    }
}

/// Estimates for one non-empty bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub mean_forecast: f64,
    /// Fraction of Positive outcomes.
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// One bin of a calibration curve; `stats` is `None` exactly when the
/// bin is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
    pub stats: Option<BinStats>,
}

/// Binned reliability estimate of an observed dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub scheme: BinningScheme,
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationCurve {
    /// Total number of records across bins.
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Assign every record to its forecast's bin and estimate the per-bin
/// mean forecast, empirical Positive frequency, and 95% Wilson interval.
pub fn bin_forecasts(
    observed: &ObservedDataset,
    scheme: BinningScheme,
) -> Result<CalibrationCurve> {
    if observed.is_empty() {
        return Err(Error::EmptyDataset("cannot bin an empty dataset"));
    }
    let mut counts = vec![0u64; scheme.n_bins];
    let mut positives = vec![0u64; scheme.n_bins];
    let mut forecast_sums = vec![0.0f64; scheme.n_bins];
    for record in &observed.records {
        let i = scheme.bin_index(record.forecast.probability);
        counts[i] += 1;
        positives[i] += record.outcome.indicator() as u64;
        forecast_sums[i] += record.forecast.probability;
    }
    let bins = (0..scheme.n_bins)
        .map(|i| {
            let (low, high) = scheme.edges(i);
            let stats = (counts[i] > 0).then(|| {
                let (ci_low, ci_high) = math::wilson_interval(positives[i], counts[i]);
                BinStats {
                    mean_forecast: forecast_sums[i] / counts[i] as f64,
                    frequency: positives[i] as f64 / counts[i] as f64,
                    ci_low,
                    ci_high,
                }
            });
            CalibrationBin {
                low,
                high,
                count: counts[i] as usize,
                stats,
            }
        })
        .collect();
    Ok(CalibrationCurve { scheme, bins })
}

/// Mean of (outcome indicator − forecast probability) over the dataset.
/// Positive values mean outcomes occur more often than forecast.
pub fn mean_residual(observed: &ObservedDataset) -> Result<f64> {
    if observed.is_empty() {
        return Err(Error::EmptyDataset("mean residual of an empty dataset"));
    }
    let sum: f64 = observed.records.iter().map(|r| r.residual()).sum();
    Ok(sum / observed.len() as f64)
}

/// Fraction of Positive outcomes in the dataset.
pub fn positive_frequency(observed: &ObservedDataset) -> Result<f64> {
    if observed.is_empty() {
        return Err(Error::EmptyDataset("frequency of an empty dataset"));
    }
    let positives: f64 = observed.records.iter().map(|r| r.outcome.indicator()).sum();
    Ok(positives / observed.len() as f64)
}

/// Monte-Carlo standard error of [`mean_residual`]: sample standard
/// deviation of the residuals over sqrt(n).
pub fn residual_standard_error(observed: &ObservedDataset) -> Result<f64> {
    let n = observed.len();
    if n < 2 {
        return Err(Error::EmptyDataset(
            "standard error needs at least two records",
        ));
    }
    let mean = mean_residual(observed)?;
    let ss: f64 = observed
        .records
        .iter()
        .map(|r| {
            let d = r.residual() - mean;
            d * d
        })
        .sum();
    Ok((ss / ((n - 1) as f64 * n as f64)).sqrt())
}

/// One row of the tabular form of a calibration curve. Estimate fields
/// are empty for bins with zero count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
    pub mean_forecast: Option<f64>,
    pub frequency: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

/// Ordered plot-ready rows, one per bin including empty ones.
pub fn curve_to_table(curve: &CalibrationCurve) -> Vec<TableRow> {
    curve
        .bins
        .iter()
        .map(|bin| TableRow {
            bin_low: bin.low,
            bin_high: bin.high,
            count: bin.count,
            mean_forecast: bin.stats.map(|s| s.mean_forecast),
            frequency: bin.stats.map(|s| s.frequency),
            ci_low: bin.stats.map(|s| s.ci_low),
            ci_high: bin.stats.map(|s| s.ci_high),
        })
        .collect()
}

/// Rebuild a curve from its tabular form; inverse of [`curve_to_table`].
pub fn curve_from_table(rows: &[TableRow]) -> Result<CalibrationCurve> {
    let scheme =
        BinningScheme::new(rows.len()).map_err(|_| Error::MalformedTable("no rows".into()))?;
    let bins = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let (low, high) = scheme.edges(i);
            if row.bin_low != low || row.bin_high != high {
                return Err(Error::MalformedTable(format!(
                    "row {i} edges ({}, {}) do not match an equal-width partition into {} bins",
                    row.bin_low,
                    row.bin_high,
                    rows.len()
                )));
            }
            let stats = match (row.mean_forecast, row.frequency, row.ci_low, row.ci_high) {
                (Some(mean_forecast), Some(frequency), Some(ci_low), Some(ci_high)) => {
                    if row.count == 0 {
                        return Err(Error::MalformedTable(format!(
                            "row {i} has estimates but zero count"
                        )));
                    }
                    Some(BinStats {
                        mean_forecast,
                        frequency,
                        ci_low,
                        ci_high,
                    })
                }
                (None, None, None, None) => {
                    if row.count != 0 {
                        return Err(Error::MalformedTable(format!(
                            "row {i} has {} records but no estimates",
                            row.count
                        )));
                    }
                    None
                }
                _ => {
                    return Err(Error::MalformedTable(format!(
                        "row {i} has partially filled estimate fields"
                    )))
                }
            };
            Ok(CalibrationBin {
                low,
                high,
                count: row.count,
                stats,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationCurve { scheme, bins })
}
