use serde::{Deserialize, Serialize};

use super::levenshtein;
use crate::bleu::{tokenize, TokenizerTag};

/// Keeps texts with at least `min_chars` non-whitespace characters (Unicode scalar values).
pub fn filter_min_length(text: &str, min_chars: usize) -> bool {
    text.chars().filter(|c| !c.is_whitespace()).count() >= min_chars
}

/// Keeps a segment when the ASR output is close to the subtitle:
/// `levenshtein(asr, subtitle) / max(1, |subtitle|) <= max_norm_dist`, over `tokenizer` tokens.
pub fn filter_code_switch(asr_text: &str, subtitle: &str, tokenizer: TokenizerTag, max_norm_dist: f64) -> bool {
    let hyp = tokenize(asr_text, tokenizer);
    let reference = tokenize(subtitle, tokenizer);
    let dist = levenshtein(&hyp, &reference) as f64;
    dist / reference.len().max(1) as f64 <= max_norm_dist
}

fn default_text() -> String {
    "text".into()
}

fn default_min_chars() -> usize {
    3
}

fn default_max_norm_dist() -> f64 {
    0.5
}

fn default_char() -> TokenizerTag {
    TokenizerTag::Char
}

/// Per-record filters of a pipeline, as written in the spec file:
/// `{"kind": "min_length", "params": {"field": "text", "min_chars": 3}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterSpec {
    MinLength {
        #[serde(default = "default_text")]
        field: String,
        #[serde(default = "default_min_chars")]
        min_chars: usize,
    },
    CodeSwitch {
        asr_field: String,
        #[serde(default = "default_text")]
        ref_field: String,
        #[serde(default = "default_char")]
        tokenizer: TokenizerTag,
        #[serde(default = "default_max_norm_dist")]
        max_norm_dist: f64,
    },
    NotEmpty {
        field: String,
    },
}

impl FilterSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::MinLength { .. } => "min_length",
            Self::CodeSwitch { .. } => "code_switch",
            Self::NotEmpty { .. } => "not_empty",
        }
    }

    pub fn fields(&self) -> Vec<&str> {
        match self {
            Self::MinLength { field, .. } | Self::NotEmpty { field } => vec![field],
            Self::CodeSwitch { asr_field, ref_field, .. } => vec![asr_field, ref_field],
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Self::CodeSwitch { max_norm_dist, .. } = self {
            if !(0.0..=1.0).contains(max_norm_dist) {
                return Err(format!("max_norm_dist must lie in [0, 1], got {max_norm_dist}"));
            }
        }
        Ok(())
    }

    /// Applies the filter to field values looked up with `get`. Missing fields fail.
    pub fn keep(&self, get: impl Fn(&str) -> Option<String>) -> bool {
        match self {
            Self::MinLength { field, min_chars } => get(field).is_some_and(|t| filter_min_length(&t, *min_chars)),
            Self::NotEmpty { field } => get(field).is_some_and(|t| !t.trim().is_empty()),
            Self::CodeSwitch {
                asr_field,
                ref_field,
                tokenizer,
                max_norm_dist,
            } => match (get(asr_field), get(ref_field)) {
                (Some(asr), Some(sub)) => filter_code_switch(&asr, &sub, *tokenizer, *max_norm_dist),
                _ => false,
            },
        }
    }
}
