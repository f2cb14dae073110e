use rayon::prelude::*;

use super::MineError;
use crate::embed::EmbeddingMatrix;
use crate::scalar::{dot, norm};
use crate::Scalar;

/// Queries per work unit.
pub const DEFAULT_SHARD_ROWS: usize = 256;

/// The `k` most similar database rows of one query, by descending cosine (ties: lower index).
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub query_index: usize,
    pub neighbors: Vec<(usize, f64)>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn mean_cosine(&self) -> f64 {
        if self.neighbors.is_empty() {
            return f64::NAN;
        }
        self.neighbors.iter().map(|n| n.1).sum::<f64>() / self.neighbors.len() as f64
    }
}

pub(crate) fn row_norms<S: Scalar>(m: &EmbeddingMatrix<S>, side: &'static str) -> Result<Vec<f64>, MineError> {
    let norms: Vec<f64> = m.iter_rows().map(norm).collect();
    if let Some(row) = norms.iter().position(|&n| n == 0.0) {
        return Err(MineError::ZeroVector { side, row });
    }
    Ok(norms)
}

#[inline]
pub(crate) fn cos_normed<S: Scalar>(a: &[S], na: f64, b: &[S], nb: f64) -> f64 {
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

pub(crate) fn check_dims<S: Scalar>(q: &EmbeddingMatrix<S>, db: &EmbeddingMatrix<S>) -> Result<(), MineError> {
    if db.is_empty() {
        return Err(MineError::EmptyDatabase);
    }
    if q.dim() != db.dim() {
        return Err(MineError::DimMismatch {
            queries: q.dim(),
            database: db.dim(),
        });
    }
    Ok(())
}

fn by_rank(a: &(usize, f64), b: &(usize, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// Exact cosine kNN by linear scan.
pub fn knn<S: Scalar>(queries: &EmbeddingMatrix<S>, database: &EmbeddingMatrix<S>, k_nn: usize) -> Result<Vec<NeighborList>, MineError> {
    knn_sharded(queries, database, k_nn, DEFAULT_SHARD_ROWS)
}

/// [`knn`] with an explicit shard size. Shards run in parallel; the result does not depend
/// on the shard size or the number of workers.
pub fn knn_sharded<S: Scalar>(
    queries: &EmbeddingMatrix<S>,
    database: &EmbeddingMatrix<S>,
    k_nn: usize,
    shard_rows: usize,
) -> Result<Vec<NeighborList>, MineError> {
    if k_nn == 0 {
        return Err(MineError::InvalidParam("k_nn must be at least 1".into()));
    }
    if shard_rows == 0 {
        return Err(MineError::InvalidParam("shard size must be at least 1".into()));
    }
    check_dims(queries, database)?;
    let db_norms = row_norms(database, "database")?;
    let q_norms = row_norms(queries, "query")?;
    let k = k_nn.min(database.rows());

    let starts: Vec<usize> = (0..queries.rows()).step_by(shard_rows).collect();
    let shards: Vec<Vec<NeighborList>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + shard_rows).min(queries.rows());
            (start..end)
                .map(|qi| {
                    let q = queries.row(qi);
                    let mut scored: Vec<(usize, f64)> = database
                        .iter_rows()
                        .zip(&db_norms)
                        .enumerate()
                        .map(|(j, (row, &nd))| (j, cos_normed(q, q_norms[qi], row, nd)))
                        .collect();
                    if k < scored.len() {
                        scored.select_nth_unstable_by(k - 1, by_rank);
                        scored.truncate(k);
                    }
                    scored.sort_unstable_by(by_rank);
                    NeighborList {
                        query_index: qi,
                        neighbors: scored,
                    }
                })
                .collect()
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<f64>]) -> EmbeddingMatrix<f64> {
        EmbeddingMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn self_match_is_top1() {
        let db = mat(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.3, -0.2, 0.9]]);
        let q = mat(&[db.row(3).to_vec()]);
        let nl = knn(&q, &db, 2).unwrap();
        assert_eq!(nl[0].neighbors[0].0, 3);
        assert!((nl[0].neighbors[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_row_database() {
        let db = mat(&[vec![1.0, 2.0]]);
        let q = mat(&[vec![1.0, 0.0], vec![-1.0, 0.5]]);
        for nl in knn(&q, &db, 4).unwrap() {
            assert_eq!(nl.neighbors.len(), 1);
            assert_eq!(nl.neighbors[0].0, 0);
        }
    }

    #[test]
    fn ties_prefer_lower_index() {
        let db = mat(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]]);
        let nl = knn(&mat(&[vec![1.0, 0.0]]), &db, 2).unwrap();
        assert_eq!(nl[0].neighbors.iter().map(|n| n.0).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn errors() {
        let db = mat(&[vec![1.0, 0.0]]);
        assert!(matches!(knn(&mat(&[vec![1.0]]), &db, 1), Err(MineError::DimMismatch { .. })));
        assert!(matches!(knn(&db, &EmbeddingMatrix::empty(2), 1), Err(MineError::EmptyDatabase)));
        assert!(knn(&db, &db, 0).is_err());
        assert!(matches!(
            knn(&mat(&[vec![0.0, 0.0]]), &db, 1),
            Err(MineError::ZeroVector { side: "query", row: 0 })
        ));
    }
}
