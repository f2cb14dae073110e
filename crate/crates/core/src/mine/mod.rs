//! Embedding-based parallel data mining.
//!
//! Exact cosine kNN in both directions feeds a margin score (a pair's cosine relative to the
//! mean cosine of both neighborhoods). Candidates are kept above a threshold, optionally
//! de-overlapped on the audio side, and the same scoring drives the similarity-search
//! error-rate evaluation.

mod knn;
mod margin;
mod overlap;
mod pairs;
mod simsearch;

pub use knn::{knn, knn_sharded, NeighborList, DEFAULT_SHARD_ROWS};
pub use margin::{margin_score, Margin};
pub use overlap::{filter_overlap, overlap_ratio, Side};
pub use pairs::{
    attach_segments, mine_pairs, read_pairs, read_segments, write_pairs, Direction, MineParams, MinedPair, PAIRS_HEADER,
};
pub use simsearch::{simsearch_error_rate, SimSearchReport};

use crate::corpus::CorpusError;
use crate::embed::EmbedError;

#[derive(Debug, thiserror::Error)]
pub enum MineError {
    #[error("dimension mismatch: queries have {queries}, database has {database}")]
    DimMismatch { queries: usize, database: usize },
    #[error("empty database")]
    EmptyDatabase,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("{side} row {row} is a zero vector; cosine is undefined")]
    ZeroVector { side: &'static str, row: usize },
    #[error("degenerate neighborhood: margin denominator {0} <= 0")]
    DegenerateNeighborhood(f64),
    #[error("pair {src_id} -> {tgt_id} has no {side} segment")]
    MissingSegment { src_id: String, tgt_id: String, side: &'static str },
    #[error("audio id {0:?} has no gold entry")]
    MissingGold(String),
    #[error("gold text id {gold:?} for audio {audio:?} is not among the text rows")]
    UnknownGold { audio: String, gold: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}
