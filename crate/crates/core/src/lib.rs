//! Corpus engineering for textless speech-to-speech translation.
//!
//! The crate covers the non-neural half of a unit-based S2ST data pipeline:
//!
//! * [`corpus`]: utterance manifests (TSV / JSONL) and per-language statistics.
//! * [`quantize`]: k-means codebooks, frame-to-unit assignment, unit dedup and CTC collapse.
//! * [`embed`]: embedding matrices, the `EMB1` binary format, pooling and cosine kernels.
//! * [`mine`]: exact kNN, margin scoring, threshold mining, overlap filtering and
//!   similarity-search error rates.
//! * [`balance`]: temperature sampling across languages.
//! * [`bleu`]: SacreBLEU-compatible tokenization, Tâi-lô syllable handling, corpus BLEU and ASR-BLEU.
//! * [`cascade`]: pseudo-labeling pipelines over pluggable model adapters, with data filters.
//!
//! The vector math is generic over [`Scalar`] (`f32` or `f64`); the aliases below name the
//! concrete instantiations used by the command-line tool.

pub mod balance;
pub mod bleu;
pub mod cascade;
pub mod corpus;
pub mod embed;
pub mod mine;
pub mod quantize;
mod scalar;

pub use scalar::Scalar;

pub use balance::{sample_schedule, temperature_distribution, LanguageCounts, SamplingDistribution};
pub use bleu::{asr_bleu, corpus_bleu, tokenize, BleuReport, Smoothing, TokenizedCorpus, TokenizerTag};
pub use cascade::{run_cascade, Adapter, AdapterKind, PipelineSpec};
pub use corpus::{manifest_stats, read_manifest, write_manifest, Manifest, ManifestFormat, Segment, Utterance};
pub use embed::{cosine, l2_normalize, max_pool, EmbeddingMatrix};
pub use mine::{filter_overlap, knn, margin_score, mine_pairs, simsearch_error_rate, MinedPair, NeighborList};
pub use quantize::{assign_units, ctc_collapse, dedup_units, kmeans_fit, Codebook, UnitSequence};

/// Single-precision embeddings, the on-disk precision of `EMB1` files.
pub type Embeddings = EmbeddingMatrix<f32>;
/// Double-precision embeddings.
pub type Embeddings64 = EmbeddingMatrix<f64>;
/// Single-precision codebook.
pub type Codebook32 = Codebook<f32>;
/// Double-precision codebook.
pub type Codebook64 = Codebook<f64>;

/// Crate-level error, one variant per module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
    #[error(transparent)]
    Quantize(#[from] quantize::QuantizeError),
    #[error(transparent)]
    Mine(#[from] mine::MineError),
    #[error(transparent)]
    Balance(#[from] balance::BalanceError),
    #[error(transparent)]
    Bleu(#[from] bleu::BleuError),
    #[error(transparent)]
    Cascade(#[from] cascade::CascadeError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
