use std::collections::HashMap;
use std::str::FromStr;

use super::pairs::pair_order;
use super::{MineError, MinedPair};
use crate::corpus::Segment;

/// Which side's segments are constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Src,
    Tgt,
    Both,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "src" => Ok(Self::Src),
            "tgt" => Ok(Self::Tgt),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown side {other:?} (expected src, tgt or both)")),
        }
    }
}

/// Intersection length over the shorter segment's length; 0 for different audio ids.
pub fn overlap_ratio(a: &Segment, b: &Segment) -> f64 {
    if a.audio_id != b.audio_id {
        return 0.0;
    }
    a.intersection(b) / a.duration().min(b.duration())
}

fn fits(kept: &HashMap<String, Vec<Segment>>, seg: &Segment, max_overlap: f64) -> bool {
    kept.get(&seg.audio_id)
        .is_none_or(|segs| segs.iter().all(|k| overlap_ratio(k, seg) <= max_overlap))
}

/// Greedy de-overlap: visit pairs by descending score and keep a pair only if its segment
/// overlaps every already-kept segment of the same audio by at most `max_overlap`.
pub fn filter_overlap(pairs: &[MinedPair], max_overlap: f64, side: Side) -> Result<Vec<MinedPair>, MineError> {
    if !(0.0..=1.0).contains(&max_overlap) {
        return Err(MineError::InvalidParam(format!("max_overlap must lie in [0, 1], got {max_overlap}")));
    }
    let (use_src, use_tgt) = match side {
        Side::Src => (true, false),
        Side::Tgt => (false, true),
        Side::Both => (true, true),
    };
    for p in pairs {
        let missing = |s: &'static str| MineError::MissingSegment {
            src_id: p.src_id.clone(),
            tgt_id: p.tgt_id.clone(),
            side: s,
        };
        if use_src && p.src_segment.is_none() {
            return Err(missing("source"));
        }
        if use_tgt && p.tgt_segment.is_none() {
            return Err(missing("target"));
        }
        for seg in [&p.src_segment, &p.tgt_segment].into_iter().flatten() {
            seg.validate()?;
        }
    }

    let mut order: Vec<&MinedPair> = pairs.iter().collect();
    order.sort_by(|a, b| pair_order(a, b));
    let mut kept_src: HashMap<String, Vec<Segment>> = HashMap::new();
    let mut kept_tgt: HashMap<String, Vec<Segment>> = HashMap::new();
    let mut out = Vec::new();
    for p in order {
        let src_ok = !use_src || fits(&kept_src, p.src_segment.as_ref().unwrap(), max_overlap);
        let tgt_ok = !use_tgt || fits(&kept_tgt, p.tgt_segment.as_ref().unwrap(), max_overlap);
        if src_ok && tgt_ok {
            if use_src {
                let s = p.src_segment.clone().unwrap();
                kept_src.entry(s.audio_id.clone()).or_default().push(s);
            }
            if use_tgt {
                let s = p.tgt_segment.clone().unwrap();
                kept_tgt.entry(s.audio_id.clone()).or_default().push(s);
            }
            out.push(p.clone());
        }
    }
    Ok(out)
}
