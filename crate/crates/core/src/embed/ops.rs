use super::{EmbedError, EmbeddingMatrix};
use crate::scalar::{dot, norm};
use crate::Scalar;

/// Elementwise maximum over the rows of `frames`.
pub fn max_pool<S: Scalar>(frames: &EmbeddingMatrix<S>) -> Result<Vec<S>, EmbedError> {
    let mut rows = frames.iter_rows();
    let mut out = rows.next().ok_or(EmbedError::EmptyInput)?.to_vec();
    for row in rows {
        for (o, &v) in out.iter_mut().zip(row) {
            if v > *o {
                *o = v;
            }
        }
    }
    Ok(out)
}

/// Pools consecutive runs of frames, one output row per `(id, frame_count)` entry.
pub fn max_pool_segments<S: Scalar>(
    frames: &EmbeddingMatrix<S>,
    lengths: &[(String, usize)],
) -> Result<EmbeddingMatrix<S>, EmbedError> {
    let total: usize = lengths.iter().map(|(_, n)| n).sum();
    if total != frames.rows() {
        return Err(EmbedError::Shape(format!(
            "lengths cover {total} frames but the matrix has {}",
            frames.rows()
        )));
    }
    let mut data = Vec::with_capacity(lengths.len() * frames.dim());
    let mut start = 0;
    for (_, n) in lengths {
        data.extend(max_pool(&frames.slice_rows(start..start + n))?);
        start += n;
    }
    EmbeddingMatrix::new(lengths.len(), frames.dim(), data)?.with_ids(lengths.iter().map(|(id, _)| id.clone()).collect())
}

/// Result of [`l2_normalize`]: the scaled matrix and how many zero rows passed through.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<S: Scalar> {
    pub matrix: EmbeddingMatrix<S>,
    pub zero_rows: usize,
}

/// Scales every nonzero row to unit L2 norm. Zero rows are left as they are and counted.
pub fn l2_normalize<S: Scalar>(m: &EmbeddingMatrix<S>) -> Normalized<S> {
    let mut zero_rows = 0;
    let mut data = Vec::with_capacity(m.data().len());
    for row in m.iter_rows() {
        let n = norm(row);
        if n == 0.0 {
            zero_rows += 1;
            data.extend_from_slice(row);
        } else {
            data.extend(row.iter().map(|&v| S::from_f64_lossy(v.as_f64() / n)));
        }
    }
    let (rows, dim, _, ids) = m.clone().into_parts();
    let mut matrix = EmbeddingMatrix::new(rows, dim, data).expect("scaling preserves shape and finiteness");
    if let Some(ids) = ids {
        matrix = matrix.with_ids(ids).expect("ids already validated");
    }
    Normalized { matrix, zero_rows }
}

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> Result<f64, EmbedError> {
    if a.len() != b.len() {
        return Err(EmbedError::Shape(format!("vectors of length {} and {}", a.len(), b.len())));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}
