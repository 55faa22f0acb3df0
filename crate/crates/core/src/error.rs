//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field violates its documented range or ordering.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A collection or scheduled time lies outside the simulation horizon.
    #[error("time {value} outside the horizon [0, {horizon}]")]
    TimeOutOfRange { value: f64, horizon: f64 },

    /// A probability left the domain required by the operation.
    #[error("probability {0} outside the open interval (0, 1)")]
    DegenerateProbability(f64),

    /// The operation needs at least one record.
    #[error("dataset is empty: {0}")]
    EmptyDataset(&'static str),

    /// A forecast references an event id that is not in the dataset.
    #[error("forecast references unknown event id {0:?}")]
    UnknownEvent(String),

    /// The surprisingly-early subset of a filtered dataset is empty by
    /// construction; asking for it signals a pipeline mistake.
    #[error("surprisingly-early subset requested on an already filtered dataset")]
    AlreadyFiltered,

    /// Two datasets that must share a collection time do not.
    #[error("collection times differ: {left} vs {right}")]
    CollectionTimeMismatch { left: f64, right: f64 },

    /// The significance test is undefined without excluded records.
    #[error("no records scheduled after the collection time; shift test undefined")]
    NoExcludedRecords,

    /// A malformed archive row, with its 1-based data row number.
    #[error("archive row {row} ({field}): {message}")]
    ArchiveRow {
        row: usize,
        field: &'static str,
        message: String,
    },

    /// The archive header is missing or names the wrong columns.
    #[error("archive header: {0}")]
    ArchiveHeader(String),

    /// A parsed archive contradicts itself at observation time.
    #[error("archive inconsistency for event {event_id:?}: {message}")]
    ArchiveInconsistency { event_id: String, message: String },

    /// A calibration table cannot be reassembled into a curve.
    #[error("malformed calibration table: {0}")]
    MalformedTable(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the underlying cause is an i/o failure rather than
    /// invalid data, so callers can distinguish exit statuses.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
