use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::knn::{knn_sharded, DEFAULT_SHARD_ROWS};
use super::margin::{margin_from_means, Margin};
use super::{MineError, NeighborList};
use crate::corpus::Segment;
use crate::embed::{l2_normalize, EmbeddingMatrix};
use crate::Scalar;

pub const PAIRS_HEADER: &str = "score\tsrc_id\ttgt_id\tsrc_audio\tsrc_start\tsrc_end\ttgt_audio\ttgt_start\ttgt_end";

/// A scored source/target alignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinedPair {
    pub src_id: String,
    pub tgt_id: String,
    pub score: f64,
    pub src_segment: Option<Segment>,
    pub tgt_segment: Option<Segment>,
}

impl MinedPair {
    pub fn new(src_id: impl Into<String>, tgt_id: impl Into<String>, score: f64) -> Self {
        Self {
            src_id: src_id.into(),
            tgt_id: tgt_id.into(),
            score,
            src_segment: None,
            tgt_segment: None,
        }
    }
}

/// Output order: descending score, then `(src_id, tgt_id)`.
pub(crate) fn pair_order(a: &MinedPair, b: &MinedPair) -> std::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.src_id.cmp(&b.src_id))
        .then_with(|| a.tgt_id.cmp(&b.tgt_id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Best target for every source row.
    #[default]
    Forward,
    /// Best source for every target row.
    Backward,
    /// Pairs that are best in both directions.
    Intersect,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Self::Forward),
            "backward" => Ok(Self::Backward),
            "intersect" => Ok(Self::Intersect),
            other => Err(format!("unknown direction {other:?} (expected forward, backward or intersect)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineParams {
    pub k_nn: usize,
    /// Minimum margin score; `f64::NEG_INFINITY` keeps every candidate.
    pub threshold: f64,
    pub direction: Direction,
    pub margin: Margin,
    /// L2-normalize both sides before the search.
    pub normalize: bool,
    pub shard_rows: usize,
}

impl Default for MineParams {
    fn default() -> Self {
        Self {
            k_nn: 4,
            threshold: f64::NEG_INFINITY,
            direction: Direction::Forward,
            margin: Margin::Ratio,
            normalize: true,
            shard_rows: DEFAULT_SHARD_ROWS,
        }
    }
}

/// For each query list, the candidate with the highest margin (ties: lower candidate index).
fn best_by_margin(
    lists: &[NeighborList],
    own_means: &[f64],
    other_means: &[f64],
    own_is_src: bool,
    margin: Margin,
) -> Result<Vec<(usize, f64)>, MineError> {
    lists
        .iter()
        .map(|nl| {
            let mut best: Option<(usize, f64)> = None;
            for &(j, cos) in &nl.neighbors {
                let (mx, my) = if own_is_src {
                    (own_means[nl.query_index], other_means[j])
                } else {
                    (other_means[j], own_means[nl.query_index])
                };
                let s = margin_from_means(cos, mx, my, margin)?;
                if best.is_none_or(|(bj, bs)| s > bs || (s == bs && j < bj)) {
                    best = Some((j, s));
                }
            }
            best.ok_or(MineError::EmptyDatabase)
        })
        .collect()
}

/// Margin-based mining of source/target rows.
pub fn mine_pairs<S: Scalar>(
    src: &EmbeddingMatrix<S>,
    tgt: &EmbeddingMatrix<S>,
    params: &MineParams,
) -> Result<Vec<MinedPair>, MineError> {
    if params.threshold.is_nan() {
        return Err(MineError::InvalidParam("threshold must not be NaN".into()));
    }
    let (src_n, tgt_n);
    let (src, tgt) = if params.normalize {
        src_n = l2_normalize(src).matrix;
        tgt_n = l2_normalize(tgt).matrix;
        (&src_n, &tgt_n)
    } else {
        (src, tgt)
    };
    if src.is_empty() {
        super::knn::check_dims(src, tgt)?;
        return Ok(Vec::new());
    }
    let nn_src = knn_sharded(src, tgt, params.k_nn, params.shard_rows)?;
    let nn_tgt = knn_sharded(tgt, src, params.k_nn, params.shard_rows)?;
    let mean_src: Vec<f64> = nn_src.iter().map(NeighborList::mean_cosine).collect();
    let mean_tgt: Vec<f64> = nn_tgt.iter().map(NeighborList::mean_cosine).collect();

    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    match params.direction {
        Direction::Forward => {
            let fwd = best_by_margin(&nn_src, &mean_src, &mean_tgt, true, params.margin)?;
            raw.extend(fwd.into_iter().enumerate().map(|(i, (j, s))| (i, j, s)));
        }
        Direction::Backward => {
            let bwd = best_by_margin(&nn_tgt, &mean_tgt, &mean_src, false, params.margin)?;
            raw.extend(bwd.into_iter().enumerate().map(|(j, (i, s))| (i, j, s)));
        }
        Direction::Intersect => {
            let fwd = best_by_margin(&nn_src, &mean_src, &mean_tgt, true, params.margin)?;
            let bwd = best_by_margin(&nn_tgt, &mean_tgt, &mean_src, false, params.margin)?;
            raw.extend(
                fwd.into_iter()
                    .enumerate()
                    .filter(|&(i, (j, _))| bwd[j].0 == i)
                    .map(|(i, (j, s))| (i, j, s)),
            );
        }
    }

    let mut pairs: Vec<MinedPair> = raw
        .into_iter()
        .filter(|&(_, _, s)| s >= params.threshold)
        .map(|(i, j, s)| MinedPair::new(src.id_of(i), tgt.id_of(j), s))
        .collect();
    pairs.sort_by(pair_order);
    Ok(pairs)
}

/// Fills in segments from `id -> Segment` tables; ids without an entry keep `None`.
pub fn attach_segments(pairs: &mut [MinedPair], src: &HashMap<String, Segment>, tgt: &HashMap<String, Segment>) {
    for p in pairs {
        if let Some(s) = src.get(&p.src_id) {
            p.src_segment = Some(s.clone());
        }
        if let Some(s) = tgt.get(&p.tgt_id) {
            p.tgt_segment = Some(s.clone());
        }
    }
}

/// Reads a segment table: header `id\taudio_id\tstart_s\tend_s`, one segment per line.
pub fn read_segments(text: &str) -> Result<HashMap<String, Segment>, MineError> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let perr = |msg: String| MineError::Parse { line: line_no, msg };
        if f.len() != 4 {
            return Err(perr(format!("expected 4 columns, found {}", f.len())));
        }
        let start = f[2].parse::<f64>().map_err(|_| perr(format!("bad start {:?}", f[2])))?;
        let end = f[3].parse::<f64>().map_err(|_| perr(format!("bad end {:?}", f[3])))?;
        let seg = Segment::new(f[1], start, end).map_err(|e| perr(e.to_string()))?;
        if out.insert(f[0].to_string(), seg).is_some() {
            return Err(perr(format!("duplicate id {:?}", f[0])));
        }
    }
    Ok(out)
}

fn push_segment(out: &mut String, seg: &Option<Segment>) {
    match seg {
        Some(s) => {
            let _ = write!(out, "\t{}\t{}\t{}", s.audio_id, s.start_s, s.end_s);
        }
        None => out.push_str("\t\t\t"),
    }
}

/// Serializes pairs as TSV with [`PAIRS_HEADER`]. Scores use the shortest round-trip form.
pub fn write_pairs(pairs: &[MinedPair]) -> String {
    let mut out = String::from(PAIRS_HEADER);
    out.push('\n');
    for p in pairs {
        let _ = write!(out, "{}\t{}\t{}", p.score, p.src_id, p.tgt_id);
        push_segment(&mut out, &p.src_segment);
        push_segment(&mut out, &p.tgt_segment);
        out.push('\n');
    }
    out
}

pub fn read_pairs(text: &str) -> Result<Vec<MinedPair>, MineError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == PAIRS_HEADER => {}
        _ => {
            return Err(MineError::Parse {
                line: 1,
                msg: "missing pair header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| MineError::Parse { line: line_no, msg };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 9 {
            return Err(perr(format!("expected 9 columns, found {}", f.len())));
        }
        let score = f[0].parse::<f64>().map_err(|_| perr(format!("bad score {:?}", f[0])))?;
        if !score.is_finite() || f[1].is_empty() || f[2].is_empty() {
            return Err(perr("score must be finite and ids nonempty".into()));
        }
        let seg = |a: &str, s: &str, e: &str| -> Result<Option<Segment>, MineError> {
            if a.is_empty() && s.is_empty() && e.is_empty() {
                return Ok(None);
            }
            let start = s.parse::<f64>().map_err(|_| perr(format!("bad start {s:?}")))?;
            let end = e.parse::<f64>().map_err(|_| perr(format!("bad end {e:?}")))?;
            Segment::new(a, start, end).map(Some).map_err(|err| perr(err.to_string()))
        };
        out.push(MinedPair {
            src_id: f[1].to_string(),
            tgt_id: f[2].to_string(),
            score,
            src_segment: seg(f[3], f[4], f[5])?,
            tgt_segment: seg(f[6], f[7], f[8])?,
        });
    }
    Ok(out)
}
