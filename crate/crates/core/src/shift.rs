//! Calibration shift between the unfiltered and filtered views of an
//! observed dataset, and a permutation test for its significance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{mean_residual, positive_frequency, BinningScheme};
use crate::censor::{filter_scheduled, surprisingly_early_subset, ObservedDataset, Provenance};
use crate::error::{Error, Result};

/// Outcome of the shift significance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    /// Unfiltered mean residual minus filtered mean residual.
    pub shift: f64,
    /// Size of the surprisingly-early subset the filter removes.
    pub excluded_count: usize,
    /// One-sided Monte-Carlo permutation p-value, add-one estimated, so
    /// it is always strictly positive.
    pub p_value: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

fn check_pair(unfiltered: &ObservedDataset, filtered: &ObservedDataset) -> Result<()> {
    if unfiltered.collection_time != filtered.collection_time {
        return Err(Error::CollectionTimeMismatch {
            left: unfiltered.collection_time.0,
            right: filtered.collection_time.0,
        });
    }
    if filtered.provenance != Provenance::Filtered || filtered.len() > unfiltered.len() {
        return Err(Error::InvalidConfig(
            "second dataset must be the filtered view of the first".into(),
        ));
    }
    Ok(())
}

/// Mean residual of the unfiltered dataset minus that of the filtered
/// one: how much the surprisingly-early records inflate observed
/// frequencies relative to forecasts. Zero when nothing was excluded.
pub fn calibration_shift(unfiltered: &ObservedDataset, filtered: &ObservedDataset) -> Result<f64> {
    check_pair(unfiltered, filtered)?;
    Ok(mean_residual(unfiltered)? - mean_residual(filtered)?)
}

/// Raw difference in Positive frequency between the two views. Whenever
/// the excluded records are all Positive this is nonnegative, and
/// strictly positive as soon as the filtered view contains a Negative.
pub fn raw_frequency_shift(
    unfiltered: &ObservedDataset,
    filtered: &ObservedDataset,
) -> Result<f64> {
    check_pair(unfiltered, filtered)?;
    Ok(positive_frequency(unfiltered)? - positive_frequency(filtered)?)
}

/// Residuals sorted into a canonical order, so sums and the permutation
/// draw do not depend on how the caller ordered the records.
fn canonical_residuals(records: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = records.collect();
    v.sort_by(f64::total_cmp);
    v
}

struct PermutationProblem {
    /// All residuals, canonically ordered.
    pool: Vec<f64>,
    /// Index ranges of `pool` to draw from, with the number to draw from
    /// each; a single full-range group for the unstratified test.
    groups: Vec<(std::ops::Range<usize>, usize)>,
    observed_stat: f64,
    total: f64,
    excluded_count: usize,
}

impl PermutationProblem {
    /// Shift statistic when the residuals in `excluded_sum` are treated
    /// as the excluded set.
    fn stat(&self, excluded_sum: f64) -> f64 {
        let n = self.pool.len() as f64;
        let retained = (self.pool.len() - self.excluded_count) as f64;
        self.total / n - (self.total - excluded_sum) / retained
    }

    fn p_value(&self, n_resamples: usize, seed: u64) -> f64 {
        let exceed: usize = (0..n_resamples)
            .into_par_iter()
            .map(|iter| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(iter as u64);
                let mut sum = 0.0;
                for (range, draw) in &self.groups {
                    let len = range.len();
                    for idx in rand::seq::index::sample(&mut rng, len, *draw) {
                        sum += self.pool[range.start + idx];
                    }
                }
                usize::from(self.stat(sum) >= self.observed_stat)
            })
            .sum();
        (exceed + 1) as f64 / (n_resamples + 1) as f64
    }
}

fn validate_test_inputs(unfiltered: &ObservedDataset, n_resamples: usize) -> Result<()> {
    if n_resamples < 1000 {
        return Err(Error::InvalidConfig(format!(
            "need at least 1000 resamples for a stable p-value, got {n_resamples}"
        )));
    }
    if unfiltered.provenance != Provenance::Unfiltered {
        return Err(Error::InvalidConfig(
            "significance test expects the unfiltered dataset".into(),
        ));
    }
    Ok(())
}

fn build_result(
    unfiltered: &ObservedDataset,
    problem: &PermutationProblem,
    n_resamples: usize,
    seed: u64,
) -> Result<ShiftResult> {
    let filtered = filter_scheduled(unfiltered);
    if filtered.is_empty() {
        return Err(Error::EmptyDataset(
            "every record is scheduled after the collection time",
        ));
    }
    Ok(ShiftResult {
        shift: calibration_shift(unfiltered, &filtered)?,
        excluded_count: problem.excluded_count,
        p_value: problem.p_value(n_resamples, seed),
        n_resamples,
        seed,
    })
}

/// One-sided permutation test of the null that the excluded records'
/// residuals are exchangeable with the retained ones: repeatedly redraw
/// `excluded_count` records from the pooled dataset without replacement,
/// recompute the shift, and count how often it reaches the observed one.
/// Deterministic given the seed and independent of record order.
pub fn shift_significance(
    unfiltered: &ObservedDataset,
    n_resamples: usize,
    seed: u64,
) -> Result<ShiftResult> {
    validate_test_inputs(unfiltered, n_resamples)?;
    let excluded = surprisingly_early_subset(unfiltered)?;
    if excluded.is_empty() {
        return Err(Error::NoExcludedRecords);
    }
    if excluded.len() == unfiltered.len() {
        return Err(Error::EmptyDataset(
            "every record is scheduled after the collection time",
        ));
    }

    let pool = canonical_residuals(unfiltered.records.iter().map(|r| r.residual()));
    let total: f64 = pool.iter().sum();
    let excluded_sum: f64 = canonical_residuals(excluded.iter().map(|r| r.residual()))
        .iter()
        .sum();
    let mut problem = PermutationProblem {
        groups: vec![(0..pool.len(), excluded.len())],
        pool,
        observed_stat: 0.0,
        total,
        excluded_count: excluded.len(),
    };
    problem.observed_stat = problem.stat(excluded_sum);
    build_result(unfiltered, &problem, n_resamples, seed)
}

/// Variant of [`shift_significance`] that permutes within forecast bins:
/// each resample draws, per bin, as many records as the excluded set
/// contains there, holding the forecast composition of the excluded set
/// fixed under the null.
pub fn shift_significance_stratified(
    unfiltered: &ObservedDataset,
    scheme: BinningScheme,
    n_resamples: usize,
    seed: u64,
) -> Result<ShiftResult> {
    validate_test_inputs(unfiltered, n_resamples)?;
    let excluded_total = surprisingly_early_subset(unfiltered)?.len();
    if excluded_total == 0 {
        return Err(Error::NoExcludedRecords);
    }
    if excluded_total == unfiltered.len() {
        return Err(Error::EmptyDataset(
            "every record is scheduled after the collection time",
        ));
    }

    // Canonical order: by bin, then by residual value within the bin.
    let mut keyed: Vec<(usize, f64, bool)> = unfiltered
        .records
        .iter()
        .map(|r| {
            (
                scheme.bin_index(r.forecast.probability),
                r.residual(),
                r.scheduled_resolution > unfiltered.collection_time,
            )
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let pool: Vec<f64> = keyed.iter().map(|(_, r, _)| *r).collect();
    let total: f64 = pool.iter().sum();
    let excluded_sum: f64 = keyed
        .iter()
        .filter(|(_, _, ex)| *ex)
        .map(|(_, r, _)| r)
        .sum();

    let mut groups = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let bin = keyed[start].0;
        let end = start
            + keyed[start..]
                .iter()
                .take_while(|(b, _, _)| *b == bin)
                .count();
        let draw = keyed[start..end].iter().filter(|(_, _, ex)| *ex).count();
        if draw > 0 {
            groups.push((start..end, draw));
        }
        start = end;
    }

    let mut problem = PermutationProblem {
        pool,
        groups,
        observed_stat: 0.0,
        total,
        excluded_count: excluded_total,
    };
    problem.observed_stat = problem.stat(excluded_sum);
    build_result(unfiltered, &problem, n_resamples, seed)
}
