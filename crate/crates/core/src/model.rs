//! Formal objects of the censored-forecast model: events with a latent
//! occurrence time and a scheduled resolution date, probabilistic
//! forecasts on them, and the single classification rule that decides
//! what an observer collecting data at time `t_c` actually sees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// A point on the shared time axis. Scheduled resolution dates and
/// collection times live in `[0, T]`; latent occurrence times may be any
/// real number (an occurrence before 0 is simply observed from the start).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimePoint(pub f64);

impl TimePoint {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// The end of the observation window, `T > 0`. Validates times that
/// must fall inside `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon(f64);

impl Horizon {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(Horizon(t))
        } else {
            Err(Error::InvalidConfig(format!(
                "horizon must be a positive finite number, got {t}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Validate a scheduled date or collection time against `[0, T]`.
    pub fn time(self, value: f64) -> Result<TimePoint> {
        if value.is_finite() && (0.0..=self.0).contains(&value) {
            Ok(TimePoint(value))
        } else {
            Err(Error::TimeOutOfRange {
                value,
                horizon: self.0,
            })
        }
    }
}

/// True occurrence-time distribution of one event: normal with the given
/// location and scale. Evaluating its CDF at the scheduled date is what a
/// perfect forecaster reports; evaluated at any other horizon it doubles
/// as a density forecast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceModel {
    pub location: f64,
    pub scale: f64,
}

impl OccurrenceModel {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() || !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "occurrence model needs finite location and positive scale, got ({location}, {scale})"
            )));
        }
        Ok(OccurrenceModel { location, scale })
    }

    /// Probability that the event occurs by time `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        math::normal_cdf((t - self.location) / self.scale)
    }
}

/// One event: an opaque id, the latent time it occurs (`None` for
/// ingested events that provably never occurred; the simulator always
/// draws a finite time), and its scheduled resolution date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: String,
    pub occurrence_time: Option<f64>,
    pub scheduled_resolution: TimePoint,
}

/// A binary probabilistic forecast on one event: the probability that
/// the event occurs by its scheduled resolution date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub event_id: String,
    pub probability: f64,
    pub forecaster_id: Option<String>,
}

impl ForecastRecord {
    pub fn new(event_id: String, probability: f64, forecaster_id: Option<String>) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidConfig(format!(
                "forecast probability must lie in [0, 1], got {probability}"
            )));
        }
        Ok(ForecastRecord {
            event_id,
            probability,
            forecaster_id,
        })
    }
}

/// What an observer at a given collection time knows about one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservedOutcome {
    /// The event occurred by both its scheduled date and the collection time.
    Positive,
    /// The scheduled date passed without the event occurring.
    Negative,
    /// Neither: the outcome is not yet determined at the collection time.
    Censored,
}

impl ObservedOutcome {
    pub fn is_censored(self) -> bool {
        matches!(self, ObservedOutcome::Censored)
    }
}

/// Everything visible at one collection time: every forecast paired with
/// its observed outcome, censored records retained but flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub collection_time: TimePoint,
    pub records: Vec<(ForecastRecord, ObservedOutcome)>,
}

impl Snapshot {
    pub fn censored_count(&self) -> usize {
        self.records.iter().filter(|(_, o)| o.is_censored()).count()
    }
}

/// Classify one event as seen from collection time `t_c`.
///
/// * Positive iff it occurred by `min(t_i, t_c)` — this includes the
///   surprisingly-early case `t_c < t_i` where the outcome is already
///   known before the scheduled date.
/// * Negative iff the scheduled date has passed (`t_i <= t_c`) and the
///   event did not occur by it.
/// * Censored otherwise.
///
/// Both "occur by" comparisons are closed: an occurrence exactly at the
/// scheduled date counts as occurred, and a schedule exactly at the
/// collection time counts as resolvable.
pub fn classify_observation(event: &EventRecord, t_c: TimePoint) -> ObservedOutcome {
    let t_i = event.scheduled_resolution.0;
    match event.occurrence_time {
        Some(x) if x <= t_i.min(t_c.0) => ObservedOutcome::Positive,
        _ if t_i <= t_c.0 => ObservedOutcome::Negative,
        _ => ObservedOutcome::Censored,
    }
}
