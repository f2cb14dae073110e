//! Dense embedding matrices, the `EMB1` file format and cosine kernels.

mod emb1;
mod matrix;
mod ops;

pub use emb1::{ids_path, read_emb1, read_emb1_bytes, write_emb1, write_emb1_bytes, EMB1_MAGIC};
pub use matrix::EmbeddingMatrix;
pub use ops::{cosine, l2_normalize, max_pool, max_pool_segments, Normalized};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad EMB1 data: {0}")]
    Format(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("invalid ids: {0}")]
    Ids(String),
    #[error("cannot pool an empty set of frames")]
    EmptyInput,
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
}
