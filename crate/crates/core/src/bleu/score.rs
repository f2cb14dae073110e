use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BleuError, TokenizedCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    /// A zero n-gram precision makes the score zero.
    #[default]
    None,
    /// NIST geometric smoothing: the i-th zero precision becomes `1 / (2^i * total)`.
    Exp,
}

impl FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "exp" => Ok(Self::Exp),
            other => Err(format!("unknown smoothing {other:?} (expected none or exp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleuOptions {
    pub max_n: usize,
    pub smoothing: Smoothing,
}

impl Default for BleuOptions {
    fn default() -> Self {
        Self {
            max_n: 4,
            smoothing: Smoothing::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    /// 0..=100.
    pub bleu: f64,
    /// Modified n-gram precisions as fractions, n = 1..=max_n (after smoothing).
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    pub tokenizer: String,
    pub smoothing: Smoothing,
}

fn ngram_counts(tokens: &[String], max_n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for n in 1..=max_n.min(tokens.len()) {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Floored log, so that a zero precision drives the score to zero without NaN.
fn floored_ln(x: f64) -> f64 {
    if x == 0.0 {
        -9_999_999_999.0
    } else {
        x.ln()
    }
}

/// Corpus-level BLEU of `hyps` against one reference per segment.
pub fn corpus_bleu(hyps: &TokenizedCorpus, refs: &TokenizedCorpus, opts: &BleuOptions) -> Result<BleuReport, BleuError> {
    if hyps.len() != refs.len() {
        return Err(BleuError::SegmentMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(BleuError::EmptyCorpus);
    }
    if hyps.tokenizer_tag != refs.tokenizer_tag {
        return Err(BleuError::TokenizerMismatch {
            hyps: hyps.tokenizer_tag,
            refs: refs.tokenizer_tag,
        });
    }
    let max_n = opts.max_n;
    if max_n == 0 {
        return Err(BleuError::InvalidParam("max_n must be at least 1".into()));
    }

    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (h, r) in hyps.segments.iter().zip(&refs.segments) {
        hyp_len += h.len();
        ref_len += r.len();
        let ref_counts = ngram_counts(r, max_n);
        for (gram, count) in ngram_counts(h, max_n) {
            let n = gram.len() - 1;
            totals[n] += count;
            if let Some(&rc) = ref_counts.get(gram) {
                matches[n] += count.min(rc);
            }
        }
    }

    let brevity_penalty = if hyp_len < ref_len {
        if hyp_len > 0 {
            (1.0 - ref_len as f64 / hyp_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };

    // Precisions are accumulated as percentages, the way SacreBLEU keeps them, but the
    // geometric mean is taken over fractions so that a perfect corpus scores exactly 100.
    let mut pct = vec![0.0f64; max_n];
    let bleu = if matches.iter().all(|&m| m == 0) {
        0.0
    } else {
        let mut smooth = 1.0f64;
        for n in 0..max_n {
            if totals[n] == 0 {
                break;
            }
            if matches[n] == 0 {
                if opts.smoothing == Smoothing::Exp {
                    smooth *= 2.0;
                    pct[n] = 100.0 / (smooth * totals[n] as f64);
                }
            } else {
                pct[n] = 100.0 * matches[n] as f64 / totals[n] as f64;
            }
        }
        100.0 * brevity_penalty * (pct.iter().map(|&p| floored_ln(p / 100.0)).sum::<f64>() / max_n as f64).exp()
    };

    Ok(BleuReport {
        bleu,
        precisions: pct.iter().map(|p| p / 100.0).collect(),
        brevity_penalty,
        hyp_len,
        ref_len,
        matches,
        totals,
        tokenizer: hyps.tokenizer_tag.to_string(),
        smoothing: opts.smoothing,
    })
}
