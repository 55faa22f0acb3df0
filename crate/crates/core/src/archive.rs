//! Reading and writing forecast archives: delimiter-separated text with a
//! mandatory header, one forecast per row, either unitless real times or
//! ISO-8601 UTC timestamps (never mixed within a file).
//!
//! Column names match the record fields exactly; optional fields are
//! empty strings; `outcome` is spelled `yes` / `no` lowercase.

use std::collections::{HashMap, HashSet};
use std::io;

use serde::{Deserialize, Serialize};

use crate::censor::{ObservedDataset, ObservedRecord, Provenance, ResolvedOutcome};
use crate::error::{Error, Result};
use crate::model::{ForecastRecord, TimePoint};

/// How time fields in an archive are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeConvention {
    /// Plain real numbers on an arbitrary axis (the simulator's output).
    Unitless,
    /// RFC 3339 timestamps in UTC; parsed to Unix seconds.
    Iso8601,
}

/// Recorded resolution of an archived event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchiveOutcome {
    Yes,
    No,
}

/// One forecast row of an archive. Times are reals after parsing —
/// Unix seconds under the ISO convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRecord {
    pub event_id: String,
    pub forecaster_id: Option<String>,
    pub forecast_probability: f64,
    pub forecast_time: f64,
    pub scheduled_resolution_time: f64,
    pub resolution_time: Option<f64>,
    pub outcome: Option<ArchiveOutcome>,
}

impl ArchiveRecord {
    /// An early negative: resolved `no` before its scheduled date. The
    /// occurrence model has no mechanism for this, so such records are
    /// flagged and reported rather than silently mixed in.
    pub fn is_early_negative(&self) -> bool {
        self.outcome == Some(ArchiveOutcome::No)
            && self
                .resolution_time
                .is_some_and(|r| r < self.scheduled_resolution_time)
    }
}

/// Counts describing a parsed archive relative to a collection time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveSummary {
    pub n_forecasts: usize,
    pub n_events: usize,
    pub n_forecasters: usize,
    /// Distinct events resolved by the collection time although their
    /// scheduled date lies after it — the surprisingly-early set.
    pub n_events_scheduled_after_collection: usize,
    /// Distinct events resolved `no` before their scheduled date.
    pub n_early_negatives_flagged: usize,
}

impl ArchiveSummary {
    pub fn compute(records: &[ArchiveRecord], t_c: f64) -> ArchiveSummary {
        let mut events = HashSet::new();
        let mut forecasters = HashSet::new();
        let mut after = HashSet::new();
        let mut early_neg = HashSet::new();
        for r in records {
            events.insert(r.event_id.as_str());
            if let Some(f) = &r.forecaster_id {
                forecasters.insert(f.as_str());
            }
            if r.scheduled_resolution_time > t_c && r.resolution_time.is_some_and(|res| res <= t_c)
            {
                after.insert(r.event_id.as_str());
            }
            if r.is_early_negative() {
                early_neg.insert(r.event_id.as_str());
            }
        }
        ArchiveSummary {
            n_forecasts: records.len(),
            n_events: events.len(),
            n_forecasters: forecasters.len(),
            n_events_scheduled_after_collection: after.len(),
            n_early_negatives_flagged: early_neg.len(),
        }
    }
}

const COLUMNS: [&str; 7] = [
    "event_id",
    "forecaster_id",
    "forecast_probability",
    "forecast_time",
    "scheduled_resolution_time",
    "resolution_time",
    "outcome",
];

fn parse_time(value: &str, convention: TimeConvention) -> std::result::Result<f64, String> {
    match convention {
        TimeConvention::Unitless => {
            let v: f64 = value
                .parse()
                .map_err(|_| format!("expected a real number, got {value:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("time must be finite, got {value:?}"))
            }
        }
        TimeConvention::Iso8601 => {
            let dt = chrono::DateTime::parse_from_rfc3339(value)
                .map_err(|e| format!("expected an RFC 3339 timestamp, got {value:?} ({e})"))?;
            if dt.offset().local_minus_utc() != 0 {
                return Err(format!("timestamp {value:?} is not in UTC"));
            }
            Ok(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) / 1e9)
        }
    }
}

/// Parse a single time value under a convention — the same rule applied
/// to time fields inside an archive, exposed for collection-time flags.
pub fn parse_time_value(value: &str, convention: TimeConvention) -> Result<f64> {
    parse_time(value, convention).map_err(Error::InvalidConfig)
}

struct Row<'a> {
    index: usize,
    record: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl Row<'_> {
    fn field(&self, name: &'static str) -> Result<&str> {
        self.record
            .get(self.columns[name])
            .ok_or_else(|| Error::ArchiveRow {
                row: self.index,
                field: name,
                message: "row has fewer fields than the header".into(),
            })
    }

    fn err(&self, field: &'static str, message: String) -> Error {
        Error::ArchiveRow {
            row: self.index,
            field,
            message,
        }
    }

    fn time(&self, field: &'static str, convention: TimeConvention) -> Result<f64> {
        parse_time(self.field(field)?, convention).map_err(|m| self.err(field, m))
    }
}

/// Parse an archive, validating every row. Rows are numbered from 1,
/// header excluded, for error reporting.
pub fn parse_archive(
    reader: impl io::Read,
    convention: TimeConvention,
) -> Result<Vec<ArchiveRecord>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);

    let headers = rdr.headers()?.clone();
    let mut columns: HashMap<String, usize> = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        if !COLUMNS.contains(&name) {
            return Err(Error::ArchiveHeader(format!("unknown column {name:?}")));
        }
        if columns.insert(name.to_string(), i).is_some() {
            return Err(Error::ArchiveHeader(format!("duplicate column {name:?}")));
        }
    }
    for name in COLUMNS {
        if !columns.contains_key(name) {
            return Err(Error::ArchiveHeader(format!("missing column {name:?}")));
        }
    }

    let mut records = Vec::new();
    let mut seen: HashSet<(String, String, u64)> = HashSet::new();
    let mut event_fields: HashMap<String, (u64, Option<u64>, Option<ArchiveOutcome>)> =
        HashMap::new();

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = Row {
            index: i + 1,
            record: &record,
            columns: &columns,
        };
        if record.len() != COLUMNS.len() {
            return Err(row.err(
                "record",
                format!("expected {} fields, got {}", COLUMNS.len(), record.len()),
            ));
        }

        let event_id = row.field("event_id")?.to_string();
        if event_id.is_empty() {
            return Err(row.err("event_id", "must not be empty".into()));
        }
        let forecaster_id = match row.field("forecaster_id")? {
            "" => None,
            f => Some(f.to_string()),
        };
        let prob_text = row.field("forecast_probability")?;
        let forecast_probability: f64 = prob_text.parse().map_err(|_| {
            row.err(
                "forecast_probability",
                format!("expected a real number, got {prob_text:?}"),
            )
        })?;
        if !(0.0..=1.0).contains(&forecast_probability) {
            return Err(row.err(
                "forecast_probability",
                format!("{forecast_probability} outside [0, 1]"),
            ));
        }
        let forecast_time = row.time("forecast_time", convention)?;
        let scheduled_resolution_time = row.time("scheduled_resolution_time", convention)?;
        let resolution_time = match row.field("resolution_time")? {
            "" => None,
            _ => Some(row.time("resolution_time", convention)?),
        };
        let outcome = match row.field("outcome")? {
            "" => None,
            "yes" => Some(ArchiveOutcome::Yes),
            "no" => Some(ArchiveOutcome::No),
            other => {
                return Err(row.err(
                    "outcome",
                    format!("expected \"yes\", \"no\" or empty, got {other:?}"),
                ))
            }
        };

        if outcome.is_some() != resolution_time.is_some() {
            return Err(row.err(
                "outcome",
                "outcome and resolution_time must be present together".into(),
            ));
        }
        if outcome == Some(ArchiveOutcome::Yes)
            && resolution_time.is_some_and(|r| r > scheduled_resolution_time)
        {
            return Err(row.err(
                "resolution_time",
                "a yes outcome cannot resolve after its scheduled date".into(),
            ));
        }

        let key = (
            event_id.clone(),
            forecaster_id.clone().unwrap_or_default(),
            forecast_time.to_bits(),
        );
        if !seen.insert(key) {
            return Err(row.err(
                "forecast_time",
                "duplicate (event_id, forecaster_id, forecast_time) triple".into(),
            ));
        }

        let fields = (
            scheduled_resolution_time.to_bits(),
            resolution_time.map(f64::to_bits),
            outcome,
        );
        match event_fields.entry(event_id.clone()) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(fields);
            }
            std::collections::hash_map::Entry::Occupied(o) => {
                if *o.get() != fields {
                    return Err(row.err(
                        "event_id",
                        "event-level fields differ from an earlier row for this event".into(),
                    ));
                }
            }
        }

        records.push(ArchiveRecord {
            event_id,
            forecaster_id,
            forecast_probability,
            forecast_time,
            scheduled_resolution_time,
            resolution_time,
            outcome,
        });
    }
    Ok(records)
}

/// Write records in the unitless convention with the canonical column
/// order. Inverse of [`parse_archive`] on the parsed values.
pub fn write_archive(records: &[ArchiveRecord], writer: impl io::Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for r in records {
        wtr.write_record([
            r.event_id.as_str(),
            r.forecaster_id.as_deref().unwrap_or(""),
            &r.forecast_probability.to_string(),
            &r.forecast_time.to_string(),
            &r.scheduled_resolution_time.to_string(),
            &r.resolution_time.map(|t| t.to_string()).unwrap_or_default(),
            match r.outcome {
                Some(ArchiveOutcome::Yes) => "yes",
                Some(ArchiveOutcome::No) => "no",
                None => "",
            },
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Observe archived records at collection time `t_c`.
///
/// A resolved record becomes visible once either its resolution happened
/// (`resolution_time <= t_c`) or its scheduled date passed; before that
/// it is censored and dropped. Unresolved records are censored while
/// their schedule is in the future and are an archive inconsistency once
/// it is not (the schedule passed, so some outcome must exist).
pub fn to_observed(records: &[ArchiveRecord], t_c: f64) -> Result<ObservedDataset> {
    let mut observed = Vec::new();
    for r in records {
        match (r.outcome, r.resolution_time) {
            (Some(outcome), Some(resolution)) => {
                if resolution.min(r.scheduled_resolution_time) > t_c {
                    continue; // not yet determined at t_c
                }
                observed.push(ObservedRecord {
                    forecast: ForecastRecord {
                        event_id: r.event_id.clone(),
                        probability: r.forecast_probability,
                        forecaster_id: r.forecaster_id.clone(),
                    },
                    scheduled_resolution: TimePoint(r.scheduled_resolution_time),
                    outcome: match outcome {
                        ArchiveOutcome::Yes => ResolvedOutcome::Positive,
                        ArchiveOutcome::No => ResolvedOutcome::Negative,
                    },
                });
            }
            (None, _) => {
                if r.scheduled_resolution_time <= t_c {
                    return Err(Error::ArchiveInconsistency {
                        event_id: r.event_id.clone(),
                        message: format!(
                            "unresolved although scheduled at {} which is before the collection time {t_c}",
                            r.scheduled_resolution_time
                        ),
                    });
                }
            }
            (Some(_), None) => unreachable!("parse_archive enforces outcome with resolution_time"),
        }
    }
    Ok(ObservedDataset {
        collection_time: TimePoint(t_c),
        provenance: Provenance::Unfiltered,
        records: observed,
    })
}
