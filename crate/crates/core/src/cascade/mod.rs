//! Pseudo-labeling cascades.
//!
//! A [`PipelineSpec`] chains model adapters (ASR, MT, T2U, ...) over manifest fields and then
//! applies per-record filters. Adapters are either in-process mocks or external commands,
//! selected by URI (`mock:...`, `exec:...`), and their outputs can be memoized in a
//! content-addressed on-disk cache so interrupted runs resume cheaply.

mod adapter;
mod cache;
mod filters;
mod levenshtein;
mod run;
mod spec;

pub use adapter::{resolve_adapter, Adapter, AdapterError, AdapterKind, ExecAdapter, MockAdapter, MockBehavior};
pub use cache::{CachedAdapter, ContentCache, CACHE_DIR_ENV};
pub use filters::{filter_code_switch, filter_min_length, FilterSpec};
pub use levenshtein::levenshtein;
pub use run::{run_cascade, AdapterRegistry, CascadeOutput, CascadeReport, DroppedRecord, FilterReport, StageReport};
pub use spec::{AdapterDecl, PipelineSpec, StageSpec};

use std::path::PathBuf;

use crate::corpus::CorpusError;

#[derive(Debug, thiserror::Error)]
pub enum CascadeError {
    #[error("unknown adapter {0:?}")]
    UnknownAdapter(String),
    #[error("cyclic field dependency: stage {stage} reads {field:?}, which is only produced by itself or a later stage")]
    CyclicDependency { stage: usize, field: String },
    #[error("field {field:?} used by {user} is neither a manifest column nor produced by an earlier stage")]
    UnresolvedField { field: String, user: String },
    #[error("invalid pipeline spec: {0}")]
    InvalidSpec(String),
    #[error("bad adapter uri {uri:?}: {msg}")]
    BadUri { uri: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}
