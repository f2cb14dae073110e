//! Corpus data model: utterances, segments, manifests and their statistics.

mod io;
mod stats;
mod types;

pub use io::{parse_units, read_manifest, read_manifest_str, write_manifest, write_manifest_string, ManifestFormat};
pub use stats::{manifest_stats, LangStats};
pub use types::{Manifest, Segment, Utterance, STANDARD_COLUMNS};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("invalid utterance: {0}")]
    InvalidRecord(String),
    #[error("invalid segment {0}")]
    InvalidSegment(String),
    #[error("field {field:?} cannot be written as tsv: {reason}")]
    Unwritable { field: String, reason: String },
}
