//! Temperature sampling across languages.
//!
//! With `p_i = n_i / sum_j n_j`, language `l` is drawn with probability
//! `p_l^(1/T) / sum_i p_i^(1/T)`. `T = 1` keeps the natural proportions and large `T`
//! approaches uniform. Exponentiation is done in log space.
//!
//! Schedules are drawn with `ChaCha8Rng::seed_from_u64(seed)` (crate `rand_chacha`), which is
//! portable across platforms.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum BalanceError {
    #[error("temperature must be positive and finite, got {0}")]
    Temperature(f64),
    #[error("all language counts are zero")]
    AllZero,
    #[error("invalid count for {lang:?}: {n}")]
    BadCount { lang: String, n: f64 },
    #[error("language {0:?} listed twice")]
    DuplicateLang(String),
    #[error("language {0:?} has positive probability but an empty pool")]
    EmptyPool(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Per-language amounts: sample counts or durations.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageCounts {
    entries: Vec<(String, f64)>,
}

impl LanguageCounts {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self, BalanceError> {
        for (i, (lang, n)) in entries.iter().enumerate() {
            if !n.is_finite() || *n < 0.0 {
                return Err(BalanceError::BadCount { lang: lang.clone(), n: *n });
            }
            if entries[..i].iter().any(|(l, _)| l == lang) {
                return Err(BalanceError::DuplicateLang(lang.clone()));
            }
        }
        if !entries.iter().any(|(_, n)| *n > 0.0) {
            return Err(BalanceError::AllZero);
        }
        Ok(Self { entries })
    }

    /// Parses `lang<TAB>amount` lines; blank lines and `#` comments are skipped.
    pub fn parse_tsv(text: &str) -> Result<Self, BalanceError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| BalanceError::Parse { line: i + 1, msg };
            let (lang, n) = line.split_once('\t').ok_or_else(|| perr("expected lang<TAB>amount".into()))?;
            let n: f64 = n.trim().parse().map_err(|_| perr(format!("bad amount {n:?}")))?;
            entries.push((lang.to_string(), n));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangProb {
    pub lang: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingDistribution {
    pub temperature: f64,
    pub probs: Vec<LangProb>,
}

impl SamplingDistribution {
    pub fn get(&self, lang: &str) -> Option<f64> {
        self.probs.iter().find(|lp| lp.lang == lang).map(|lp| lp.p)
    }
}

pub fn temperature_distribution(counts: &LanguageCounts, temperature: f64) -> Result<SamplingDistribution, BalanceError> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(BalanceError::Temperature(temperature));
    }
    let total: f64 = counts.entries.iter().map(|(_, n)| n).sum();
    if temperature == 1.0 {
        let probs = counts
            .entries
            .iter()
            .map(|(lang, n)| LangProb {
                lang: lang.clone(),
                p: n / total,
            })
            .collect();
        return Ok(SamplingDistribution { temperature, probs });
    }
    let log_total = total.ln();
    let logits: Vec<Option<f64>> = counts
        .entries
        .iter()
        .map(|(_, n)| (*n > 0.0).then(|| (n.ln() - log_total) / temperature))
        .collect();
    let max = logits.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| l.map_or(0.0, |l| (l - max).exp())).collect();
    let z: f64 = weights.iter().sum();
    let probs = counts
        .entries
        .iter()
        .zip(&weights)
        .map(|((lang, _), w)| LangProb {
            lang: lang.clone(),
            p: w / z,
        })
        .collect();
    Ok(SamplingDistribution { temperature, probs })
}

/// Draws `total` ids: a language from `dist`, then an id uniformly (with replacement) from
/// that language's pool.
pub fn sample_schedule(
    dist: &SamplingDistribution,
    pools: &BTreeMap<String, Vec<String>>,
    total: usize,
    seed: u64,
) -> Result<Vec<String>, BalanceError> {
    for lp in &dist.probs {
        if lp.p > 0.0 && pools.get(&lp.lang).is_none_or(Vec::is_empty) {
            return Err(BalanceError::EmptyPool(lp.lang.clone()));
        }
    }
    let live: Vec<(&[String], f64)> = dist
        .probs
        .iter()
        .filter(|lp| lp.p > 0.0)
        .map(|lp| (pools[&lp.lang].as_slice(), lp.p))
        .collect();
    let mass: f64 = live.iter().map(|(_, p)| p).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let u = rng.random::<f64>() * mass;
        let mut acc = 0.0;
        let mut pool = live[live.len() - 1].0;
        for &(p_pool, p) in &live {
            acc += p;
            if u < acc {
                pool = p_pool;
                break;
            }
        }
        out.push(pool[rng.random_range(0..pool.len())].clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(v: &[(&str, f64)]) -> LanguageCounts {
        LanguageCounts::new(v.iter().map(|(l, n)| (l.to_string(), *n)).collect()).unwrap()
    }

    #[test]
    fn t_one_is_proportional() {
        let d = temperature_distribution(&counts(&[("zh", 900.0), ("hok", 100.0)]), 1.0).unwrap();
        assert_eq!(d.get("zh"), Some(0.9));
        assert_eq!(d.get("hok"), Some(0.1));
    }

    #[test]
    fn equal_counts_uniform() {
        for t in [0.5, 1.0, 20.0] {
            let d = temperature_distribution(&counts(&[("a", 7.0), ("b", 7.0), ("c", 7.0)]), t).unwrap();
            for lp in &d.probs {
                assert!((lp.p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_counts_get_zero() {
        let d = temperature_distribution(&counts(&[("a", 0.0), ("b", 3.0)]), 5.0).unwrap();
        assert_eq!(d.get("a"), Some(0.0));
        assert_eq!(d.get("b"), Some(1.0));
    }

    #[test]
    fn errors() {
        let c = counts(&[("a", 1.0)]);
        assert!(temperature_distribution(&c, 0.0).is_err());
        assert!(temperature_distribution(&c, -2.0).is_err());
        assert!(matches!(LanguageCounts::new(vec![("a".into(), 0.0)]), Err(BalanceError::AllZero)));
        assert!(LanguageCounts::new(vec![("a".into(), 1.0), ("a".into(), 2.0)]).is_err());
        assert!(LanguageCounts::new(vec![("a".into(), -1.0)]).is_err());
    }

    #[test]
    fn scale_invariant() {
        let a = temperature_distribution(&counts(&[("x", 900.0), ("y", 100.0)]), 20.0).unwrap();
        let b = temperature_distribution(&counts(&[("x", 9.0), ("y", 1.0)]), 20.0).unwrap();
        for (p, q) in a.probs.iter().zip(&b.probs) {
            assert!((p.p - q.p).abs() < 1e-15);
        }
    }

    #[test]
    fn schedule_cases() {
        let d = temperature_distribution(&counts(&[("a", 1.0)]), 20.0).unwrap();
        let mut pools = BTreeMap::new();
        pools.insert("a".to_string(), vec!["a1".to_string(), "a2".to_string()]);
        assert!(sample_schedule(&d, &pools, 0, 1).unwrap().is_empty());
        let s = sample_schedule(&d, &pools, 50, 1).unwrap();
        assert!(s.iter().all(|id| id.starts_with('a')));
        assert_eq!(s, sample_schedule(&d, &pools, 50, 1).unwrap());
        pools.insert("a".to_string(), vec![]);
        assert!(matches!(sample_schedule(&d, &pools, 5, 1), Err(BalanceError::EmptyPool(_))));
    }

    #[test]
    fn parse_counts() {
        let c = LanguageCounts::parse_tsv("# comment\nzh\t900\nhok\t100\n").unwrap();
        assert_eq!(c.entries().len(), 2);
        assert!(LanguageCounts::parse_tsv("zh 900\n").is_err());
    }
}
