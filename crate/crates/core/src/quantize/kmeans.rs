//! k-means++ seeding followed by Lloyd iterations.
//!
//! Row work (distances, assignments) runs on the current rayon pool. Every floating point
//! reduction has a fixed evaluation order: inertia and seeding weights are summed over
//! fixed-size chunks combined in chunk order, and centroid sums walk each cluster's members
//! in row order. The fitted codebook is therefore identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Codebook, QuantizeError, UnitSequence};
use crate::embed::EmbeddingMatrix;
use crate::scalar::sq_dist;
use crate::Scalar;

const REDUCE_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once no centroid moves farther than this (L2).
    pub tol: f64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iters: 100,
            tol: 1e-6,
        }
    }
}

/// Index and squared distance of the nearest centroid; ties go to the lowest index.
pub fn nearest_centroid<S: Scalar>(x: &[S], centroids: &EmbeddingMatrix<S>) -> (u32, f64) {
    let mut best = (0u32, f64::INFINITY);
    for (j, c) in centroids.iter_rows().enumerate() {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (j as u32, d);
        }
    }
    best
}

fn assign_all<S: Scalar>(features: &EmbeddingMatrix<S>, centroids: &EmbeddingMatrix<S>) -> Vec<(u32, f64)> {
    (0..features.rows())
        .into_par_iter()
        .map(|i| nearest_centroid(features.row(i), centroids))
        .collect()
}

fn ordered_sum(values: &[f64]) -> f64 {
    let partials: Vec<f64> = values.par_chunks(REDUCE_CHUNK).map(|c| c.iter().sum::<f64>()).collect();
    partials.iter().sum()
}

fn inertia_of(assignment: &[(u32, f64)]) -> f64 {
    let d: Vec<f64> = assignment.iter().map(|a| a.1).collect();
    ordered_sum(&d)
}

fn kmeans_pp<S: Scalar>(features: &EmbeddingMatrix<S>, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = features.rows();
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut dist: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sq_dist(features.row(i), features.row(first)))
        .collect();
    while chosen.len() < k {
        let total = ordered_sum(&dist);
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                acc += d;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // Every point coincides with a chosen center: fall back to an unchosen index.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        let c = features.row(next);
        dist.par_iter_mut().enumerate().for_each(|(i, d)| {
            let nd = sq_dist(features.row(i), c);
            if nd < *d {
                *d = nd;
            }
        });
    }
    chosen
}

fn update_centroids<S: Scalar>(
    features: &EmbeddingMatrix<S>,
    assignment: &[(u32, f64)],
    prev: &EmbeddingMatrix<S>,
) -> EmbeddingMatrix<S> {
    let k = prev.rows();
    let dim = features.dim();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &(c, _)) in assignment.iter().enumerate() {
        members[c as usize].push(i);
    }
    let mut rows: Vec<Vec<S>> = members
        .par_iter()
        .enumerate()
        .map(|(j, idx)| {
            if idx.is_empty() {
                return prev.row(j).to_vec();
            }
            let mut acc = vec![0.0f64; dim];
            for &i in idx {
                for (a, &v) in acc.iter_mut().zip(features.row(i)) {
                    *a += v.as_f64();
                }
            }
            let cnt = idx.len() as f64;
            acc.into_iter().map(|a| S::from_f64_lossy(a / cnt)).collect()
        })
        .collect();

    // Empty clusters take the points farthest from their current centroid.
    let empty: Vec<usize> = (0..k).filter(|&j| members[j].is_empty()).collect();
    if !empty.is_empty() {
        let mut order: Vec<usize> = (0..assignment.len()).collect();
        order.sort_by(|&a, &b| assignment[b].1.total_cmp(&assignment[a].1).then(a.cmp(&b)));
        for (j, &i) in empty.iter().zip(&order) {
            rows[*j] = features.row(i).to_vec();
        }
    }
    EmbeddingMatrix::new(k, dim, rows.concat()).expect("centroids stay finite")
}

fn max_displacement<S: Scalar>(a: &EmbeddingMatrix<S>, b: &EmbeddingMatrix<S>) -> f64 {
    a.iter_rows().zip(b.iter_rows()).map(|(x, y)| sq_dist(x, y).sqrt()).fold(0.0, f64::max)
}

/// Fits a `k`-centroid codebook to `features`.
///
/// Iteration stops when the largest centroid displacement falls below `tol`, after
/// `max_iters` Lloyd updates, or when an update fails to lower the inertia (which only
/// happens at floating point resolution; the previous centroids are kept). The recorded
/// inertia history is therefore non-increasing.
pub fn kmeans_fit<S: Scalar>(features: &EmbeddingMatrix<S>, params: &KMeansParams) -> Result<Codebook<S>, QuantizeError> {
    let n = features.rows();
    let k = params.k;
    if k == 0 {
        return Err(QuantizeError::InvalidParam("k must be at least 1".into()));
    }
    if features.dim() == 0 {
        return Err(QuantizeError::InvalidParam("feature dimension must be positive".into()));
    }
    if params.tol.is_nan() || params.tol < 0.0 {
        return Err(QuantizeError::InvalidParam(format!("tol must be >= 0, got {}", params.tol)));
    }
    if n < k {
        return Err(QuantizeError::InsufficientData { n, k });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let init = kmeans_pp(features, k, &mut rng);
    let init_data: Vec<S> = init.iter().flat_map(|&i| features.row(i).iter().copied()).collect();
    let mut centroids = EmbeddingMatrix::new(k, features.dim(), init_data)?;
    let mut assignment = assign_all(features, &centroids);
    let mut inertia = inertia_of(&assignment);
    let mut history = vec![inertia];
    let mut iters_run = 0;

    for _ in 0..params.max_iters {
        let next = update_centroids(features, &assignment, &centroids);
        iters_run += 1;
        let next_assignment = assign_all(features, &next);
        let next_inertia = inertia_of(&next_assignment);
        if next_inertia > inertia {
            log::debug!("k-means stopped at numerical floor after {iters_run} updates");
            break;
        }
        let moved = max_displacement(&centroids, &next);
        centroids = next;
        assignment = next_assignment;
        inertia = next_inertia;
        history.push(inertia);
        if moved < params.tol {
            break;
        }
    }

    Ok(Codebook::from_parts(centroids, params.seed, iters_run, history))
}

/// Maps every feature row to its nearest centroid.
pub fn assign_units<S: Scalar>(codebook: &Codebook<S>, features: &EmbeddingMatrix<S>) -> Result<UnitSequence, QuantizeError> {
    if features.rows() > 0 && features.dim() != codebook.dim() {
        return Err(QuantizeError::DimMismatch {
            expected: codebook.dim(),
            got: features.dim(),
        });
    }
    let units = assign_all(features, codebook.centroids()).into_iter().map(|(u, _)| u).collect();
    UnitSequence::new(codebook.k() as u32, units)
}
