//! Unit quantization: k-means codebooks, nearest-centroid assignment, and unit-sequence
//! post-processing (run dedup, CTC greedy collapse).

mod codebook;
mod kmeans;
mod units;

pub use codebook::{meta_path, read_codebook, write_codebook, Codebook, CodebookMeta};
pub use kmeans::{assign_units, kmeans_fit, nearest_centroid, KMeansParams};
pub use units::{ctc_collapse, dedup_units, remove_blanks, UnitSequence};

use crate::embed::EmbedError;

#[derive(Debug, thiserror::Error)]
pub enum QuantizeError {
    #[error("need at least k = {k} feature rows, got {n}")]
    InsufficientData { n: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("feature dimension {got} does not match codebook dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("unit {unit} at position {pos} is outside vocabulary of size {vocab_size}")]
    OutOfVocab { unit: u32, pos: usize, vocab_size: u32 },
    #[error("codebook metadata: {0}")]
    Meta(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}
