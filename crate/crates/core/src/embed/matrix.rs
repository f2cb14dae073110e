use std::collections::HashSet;

use super::EmbedError;
use crate::Scalar;

/// Row-major matrix of finite values with optional per-row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<S: Scalar> {
    rows: usize,
    dim: usize,
    data: Vec<S>,
    ids: Option<Vec<String>>,
}

impl<S: Scalar> EmbeddingMatrix<S> {
    pub fn new(rows: usize, dim: usize, data: Vec<S>) -> Result<Self, EmbedError> {
        if rows.checked_mul(dim) != Some(data.len()) {
            return Err(EmbedError::Shape(format!(
                "{rows} x {dim} matrix needs {} values, got {}",
                rows.saturating_mul(dim),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite {
                row: pos / dim.max(1),
                col: pos % dim.max(1),
            });
        }
        Ok(Self { rows, dim, data, ids: None })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self, EmbedError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(EmbedError::Shape(format!("row {bad} has {} columns, expected {dim}", rows[bad].len())));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    /// An empty matrix with a fixed width.
    pub fn empty(dim: usize) -> Self {
        Self {
            rows: 0,
            dim,
            data: Vec::new(),
            ids: None,
        }
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self, EmbedError> {
        if ids.len() != self.rows {
            return Err(EmbedError::Ids(format!("{} ids for {} rows", ids.len(), self.rows)));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(EmbedError::Ids(format!("duplicate id {id:?}")));
            }
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[S]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Row id, or the decimal row index when the matrix carries no ids.
    pub fn id_of(&self, i: usize) -> String {
        match &self.ids {
            Some(ids) => ids[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn into_parts(self) -> (usize, usize, Vec<S>, Option<Vec<String>>) {
        (self.rows, self.dim, self.data, self.ids)
    }

    /// Converts the element type. Narrowing to `f32` rounds to nearest.
    pub fn cast<T: Scalar>(&self) -> EmbeddingMatrix<T> {
        EmbeddingMatrix {
            rows: self.rows,
            dim: self.dim,
            data: self.data.iter().map(|&v| T::from_f64_lossy(v.as_f64())).collect(),
            ids: self.ids.clone(),
        }
    }

    /// Rows `range` as a new matrix (ids carried over).
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            rows: range.len(),
            dim: self.dim,
            data: self.data[range.start * self.dim..range.end * self.dim].to_vec(),
            ids: self.ids.as_ref().map(|ids| ids[range].to_vec()),
        }
    }
}
