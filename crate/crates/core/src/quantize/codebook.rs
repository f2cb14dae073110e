use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::QuantizeError;
use crate::embed::{read_emb1, write_emb1, EmbedError, EmbeddingMatrix};
use crate::Scalar;

/// `k` centroids of dimension `dim`, plus how they were fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<S: Scalar> {
    centroids: EmbeddingMatrix<S>,
    seed: u64,
    iters_run: usize,
    inertia_history: Vec<f64>,
}

/// Sidecar record stored next to the centroid matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookMeta {
    pub k: usize,
    pub dim: usize,
    pub seed: u64,
    pub iters_run: usize,
    pub final_inertia: f64,
    #[serde(default)]
    pub inertia_history: Vec<f64>,
}

impl<S: Scalar> Codebook<S> {
    pub fn from_parts(centroids: EmbeddingMatrix<S>, seed: u64, iters_run: usize, inertia_history: Vec<f64>) -> Self {
        Self {
            centroids,
            seed,
            iters_run,
            inertia_history,
        }
    }

    pub fn k(&self) -> usize {
        self.centroids.rows()
    }

    pub fn dim(&self) -> usize {
        self.centroids.dim()
    }

    pub fn centroids(&self) -> &EmbeddingMatrix<S> {
        &self.centroids
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn iters_run(&self) -> usize {
        self.iters_run
    }

    /// Inertia after seeding and after every accepted Lloyd update.
    pub fn inertia_history(&self) -> &[f64] {
        &self.inertia_history
    }

    pub fn final_inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn meta(&self) -> CodebookMeta {
        CodebookMeta {
            k: self.k(),
            dim: self.dim(),
            seed: self.seed,
            iters_run: self.iters_run,
            final_inertia: self.final_inertia(),
            inertia_history: self.inertia_history.clone(),
        }
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta.jsonl");
    PathBuf::from(p)
}

/// Writes the centroids as `EMB1` at `path` and the metadata line to `<path>.meta.jsonl`.
pub fn write_codebook<S: Scalar>(cb: &Codebook<S>, path: &Path) -> Result<(), QuantizeError> {
    write_emb1(&cb.centroids, path)?;
    let mut line = serde_json::to_string(&cb.meta()).map_err(|e| QuantizeError::Meta(e.to_string()))?;
    line.push('\n');
    let mp = meta_path(path);
    fs::write(&mp, line).map_err(|source| EmbedError::Io { path: mp, source })?;
    Ok(())
}

pub fn read_codebook<S: Scalar>(path: &Path) -> Result<Codebook<S>, QuantizeError> {
    let centroids: EmbeddingMatrix<S> = read_emb1(path)?;
    let mp = meta_path(path);
    let text = fs::read_to_string(&mp).map_err(|source| EmbedError::Io { path: mp, source })?;
    let meta: CodebookMeta = serde_json::from_str(text.lines().next().unwrap_or_default())
        .map_err(|e| QuantizeError::Meta(e.to_string()))?;
    if meta.k != centroids.rows() || meta.dim != centroids.dim() {
        return Err(QuantizeError::Meta(format!(
            "metadata says {} x {}, matrix is {} x {}",
            meta.k,
            meta.dim,
            centroids.rows(),
            centroids.dim()
        )));
    }
    if meta.k == 0 {
        return Err(QuantizeError::Meta("empty codebook".into()));
    }
    let history = if meta.inertia_history.is_empty() {
        vec![meta.final_inertia]
    } else {
        meta.inertia_history
    };
    Ok(Codebook::from_parts(centroids, meta.seed, meta.iters_run, history))
}
