//! Observation and filtering: turn events plus forecasts into the dataset
//! an observer at a given collection time can actually assemble, isolate
//! the records whose outcomes are only visible because they resolved
//! surprisingly early, and remove them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify_observation, EventRecord, ForecastRecord, ObservedOutcome, TimePoint};
use crate::simulate::SyntheticDataset;

/// Outcome of a resolved record; censored records never reach an
/// [`ObservedDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResolvedOutcome {
    Positive,
    Negative,
}

impl ResolvedOutcome {
    /// 1.0 for Positive, 0.0 for Negative.
    pub fn indicator(self) -> f64 {
        match self {
            ResolvedOutcome::Positive => 1.0,
            ResolvedOutcome::Negative => 0.0,
        }
    }
}

/// One resolved forecast: the forecast itself, the event's scheduled
/// resolution date, and how it turned out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedRecord {
    pub forecast: ForecastRecord,
    pub scheduled_resolution: TimePoint,
    pub outcome: ResolvedOutcome,
}

impl ObservedRecord {
    /// Outcome indicator minus forecast probability.
    pub fn residual(&self) -> f64 {
        self.outcome.indicator() - self.forecast.probability
    }
}

/// Whether a dataset still contains records scheduled to resolve after
/// its collection time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Unfiltered,
    Filtered,
}

/// Every record whose outcome is determined at `collection_time`,
/// censored records dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedDataset {
    pub collection_time: TimePoint,
    pub provenance: Provenance,
    pub records: Vec<ObservedRecord>,
}

impl ObservedDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Observe `events` through their `forecasts` at collection time `t_c`:
/// classify every forecast's event, keep the resolved records (including
/// surprisingly-early positives), drop the censored ones.
///
/// Forecasts join to events by id; several forecasts may reference the
/// same event and each becomes its own record.
pub fn observe(
    events: &[EventRecord],
    forecasts: &[ForecastRecord],
    t_c: TimePoint,
) -> Result<ObservedDataset> {
    let by_id: HashMap<&str, &EventRecord> =
        events.iter().map(|e| (e.event_id.as_str(), e)).collect();

    let mut records = Vec::with_capacity(forecasts.len());
    for forecast in forecasts {
        let event = by_id
            .get(forecast.event_id.as_str())
            .ok_or_else(|| Error::UnknownEvent(forecast.event_id.clone()))?;
        let outcome = match classify_observation(event, t_c) {
            ObservedOutcome::Positive => ResolvedOutcome::Positive,
            ObservedOutcome::Negative => ResolvedOutcome::Negative,
            ObservedOutcome::Censored => continue,
        };
        records.push(ObservedRecord {
            forecast: forecast.clone(),
            scheduled_resolution: event.scheduled_resolution,
            outcome,
        });
    }
    Ok(ObservedDataset {
        collection_time: t_c,
        provenance: Provenance::Unfiltered,
        records,
    })
}

impl SyntheticDataset {
    /// Observe the synthetic dataset at `t_c`, validating the collection
    /// time against the configured horizon.
    pub fn observe_at(&self, t_c: f64) -> Result<ObservedDataset> {
        let horizon = self.config.validate()?;
        observe(&self.events, &self.forecasts, horizon.time(t_c)?)
    }
}

/// Keep exactly the records whose scheduled resolution date lies at or
/// before the collection time. Idempotent.
pub fn filter_scheduled(observed: &ObservedDataset) -> ObservedDataset {
    let records = observed
        .records
        .iter()
        .filter(|r| r.scheduled_resolution <= observed.collection_time)
        .cloned()
        .collect();
    ObservedDataset {
        collection_time: observed.collection_time,
        provenance: Provenance::Filtered,
        records,
    }
}

/// The records scheduled to resolve after the collection time — exactly
/// the set the filter removes. In the model these are all Positive (the
/// outcome can only be known early because the event occurred); ingested
/// archives may contribute early Negatives, which land here too.
///
/// Asking for the subset of an already filtered dataset is a pipeline
/// error: it is empty by construction.
pub fn surprisingly_early_subset(observed: &ObservedDataset) -> Result<Vec<ObservedRecord>> {
    if observed.provenance == Provenance::Filtered {
        return Err(Error::AlreadyFiltered);
    }
    Ok(observed
        .records
        .iter()
        .filter(|r| r.scheduled_resolution > observed.collection_time)
        .cloned()
        .collect())
}
