use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::knn::{cos_normed, knn, row_norms};
use super::margin::{margin_from_means, Margin};
use super::{MineError, NeighborList};
use crate::embed::EmbeddingMatrix;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSearchReport {
    pub total: usize,
    pub errors: usize,
    /// Percentage, rounded to two decimals.
    pub error_rate_pct: f64,
    /// `(audio_id, selected_text_id, gold_text_id)` for every miss, in audio row order.
    pub mismatches: Vec<(String, String, String)>,
}

impl SimSearchReport {
    pub fn formatted(&self) -> String {
        format!("{:.2}%", self.error_rate_pct)
    }
}

/// Matches every audio row to the text row with the highest margin score over the whole
/// text set and counts the rows whose match differs from `gold`.
pub fn simsearch_error_rate<S: Scalar>(
    audio: &EmbeddingMatrix<S>,
    text: &EmbeddingMatrix<S>,
    gold: &HashMap<String, String>,
    k_nn: usize,
    margin: Margin,
) -> Result<SimSearchReport, MineError> {
    let text_index: HashMap<String, usize> = (0..text.rows()).map(|j| (text.id_of(j), j)).collect();
    let golds: Vec<String> = (0..audio.rows())
        .map(|i| {
            let id = audio.id_of(i);
            let g = gold.get(&id).ok_or_else(|| MineError::MissingGold(id.clone()))?;
            if !text_index.contains_key(g) {
                return Err(MineError::UnknownGold {
                    audio: id,
                    gold: g.clone(),
                });
            }
            Ok(g.clone())
        })
        .collect::<Result<_, _>>()?;
    if audio.is_empty() {
        return Err(MineError::InvalidParam("no audio rows to evaluate".into()));
    }

    let nn_audio = knn(audio, text, k_nn)?;
    let nn_text = knn(text, audio, k_nn)?;
    let mean_audio: Vec<f64> = nn_audio.iter().map(NeighborList::mean_cosine).collect();
    let mean_text: Vec<f64> = nn_text.iter().map(NeighborList::mean_cosine).collect();
    let na = row_norms(audio, "audio")?;
    let nt = row_norms(text, "text")?;

    let picks: Vec<usize> = (0..audio.rows())
        .into_par_iter()
        .map(|i| {
            let a = audio.row(i);
            let mut best = (0usize, f64::NEG_INFINITY);
            for j in 0..text.rows() {
                let cos = cos_normed(a, na[i], text.row(j), nt[j]);
                let s = margin_from_means(cos, mean_audio[i], mean_text[j], margin)?;
                if s > best.1 {
                    best = (j, s);
                }
            }
            Ok(best.0)
        })
        .collect::<Result<_, MineError>>()?;

    let mismatches: Vec<(String, String, String)> = picks
        .iter()
        .enumerate()
        .filter(|&(i, &j)| text.id_of(j) != golds[i])
        .map(|(i, &j)| (audio.id_of(i), text.id_of(j), golds[i].clone()))
        .collect();
    let total = audio.rows();
    let errors = mismatches.len();
    let pct = (errors as f64 * 100.0 / total as f64 * 100.0).round() / 100.0;
    Ok(SimSearchReport {
        total,
        errors,
        error_rate_pct: pct,
        mismatches,
    })
}
