//! Tokenizers, corpus BLEU and the ASR-BLEU pipeline.
//!
//! Scoring reproduces SacreBLEU's corpus statistics (per-segment clipped n-gram matches,
//! closest-reference length, the same smoothing arithmetic), except that the default
//! smoothing here is none.

mod asr;
mod score;
mod tailo;
mod tokenize;

pub use asr::asr_bleu;
pub use score::{corpus_bleu, BleuOptions, BleuReport, Smoothing};
pub use tailo::{tailo_split_syllable, tailo_syllables, TAILO_INITIALS};
pub use tokenize::{is_py_whitespace, tokenize, tokenize_13a, TokenizedCorpus, TokenizerTag};

use crate::cascade::AdapterError;

#[derive(Debug, thiserror::Error)]
pub enum BleuError {
    #[error("hypotheses have {hyps} segments, references {refs}")]
    SegmentMismatch { hyps: usize, refs: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("tokenizer mismatch: {hyps} vs {refs}")]
    TokenizerMismatch { hyps: TokenizerTag, refs: TokenizerTag },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("manifests do not align by id: {0}")]
    Misaligned(String),
    #[error("reference {0:?} has no text")]
    MissingReference(String),
    #[error("adapter {adapter:?} is a {kind} adapter, expected asr")]
    WrongAdapterKind { adapter: String, kind: String },
    #[error("transcription failed for {} id(s): {}", .0.len(), format_failures(.0))]
    AdapterFailures(Vec<(String, AdapterError)>),
}

fn format_failures(f: &[(String, AdapterError)]) -> String {
    f.iter().take(5).map(|(id, e)| format!("{id}: {e}")).collect::<Vec<_>>().join("; ")
}
