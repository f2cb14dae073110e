use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::Manifest;

/// Per-language totals. Hours are derived from the second total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LangStats {
    pub count: usize,
    pub total_duration_s: f64,
    pub total_hours: f64,
    pub speaker_count: usize,
    pub missing_duration: usize,
}

/// Groups records by language.
///
/// Durations are summed in ascending order so the totals do not depend on record order.
pub fn manifest_stats(m: &Manifest) -> BTreeMap<String, LangStats> {
    let mut durations: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut speakers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in m.records() {
        let lang = r.lang.as_str();
        let entry = counts.entry(lang).or_default();
        entry.0 += 1;
        match r.duration_s {
            Some(d) => durations.entry(lang).or_default().push(d),
            None => entry.1 += 1,
        }
        let spk = speakers.entry(lang).or_default();
        if let Some(s) = &r.speaker {
            spk.insert(s.as_str());
        }
    }
    counts
        .into_iter()
        .map(|(lang, (count, missing))| {
            let mut ds = durations.remove(lang).unwrap_or_default();
            ds.sort_by(f64::total_cmp);
            let total: f64 = ds.iter().sum();
            let stats = LangStats {
                count,
                total_duration_s: total,
                total_hours: total / 3600.0,
                speaker_count: speakers.get(lang).map_or(0, BTreeSet::len),
                missing_duration: missing,
            };
            (lang.to_string(), stats)
        })
        .collect()
}
