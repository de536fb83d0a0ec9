//! Variant-level k-anonymization, used to produce risk/utility sweeps.
//!
//! This is a deliberately crude mechanism: infrequent variants are either
//! dropped or folded, whole, into their nearest frequent variant. Traces are
//! never split or edited.

use std::fmt;
use std::str::FromStr;

use crate::distance::levenshtein;
use crate::error::{Error, Result};
use crate::event_log::{EventLog, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Drop variants occurring fewer than `k` times.
    Suppress,
    /// Reassign every variant occurring fewer than `k` times to the closest
    /// variant occurring at least `k` times.
    MergeNearest,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Suppress => "suppress",
            Strategy::MergeNearest => "merge-nearest",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "suppress" => Ok(Strategy::Suppress),
            "merge-nearest" | "merge" | "mergenearest" => Ok(Strategy::MergeNearest),
            other => Err(Error::Config(format!(
                "unknown strategy '{other}' (expected suppress or merge-nearest)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnonymizationConfig {
    k: u64,
    pub strategy: Strategy,
}

impl AnonymizationConfig {
    pub fn new(k: u64, strategy: Strategy) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(AnonymizationConfig { k, strategy })
    }

    pub fn k(&self) -> u64 {
        self.k
    }
}

/// Returns a log in which every variant occurs at least `k` times.
pub fn k_anonymize(log: &EventLog, config: &AnonymizationConfig) -> Result<EventLog> {
    let k = config.k;
    let anchors: Vec<&(Variant, u64)> = log.variants().iter().filter(|(_, c)| *c >= k).collect();
    if anchors.is_empty() {
        return Err(Error::KTooLarge { k });
    }
    match config.strategy {
        Strategy::Suppress => log.with_variants(anchors.into_iter().cloned()),
        Strategy::MergeNearest => {
            let mut counts: Vec<u64> = anchors.iter().map(|(_, c)| *c).collect();
            for (v, c) in log.variants().iter().filter(|(_, c)| *c < k) {
                let target = nearest_anchor(v, &anchors);
                counts[target] += c;
            }
            log.with_variants(
                anchors
                    .iter()
                    .zip(counts)
                    .map(|((v, _), c)| (v.clone(), c)),
            )
        }
    }
}

/// Closest anchor by normalized edit distance; ties go to the higher count,
/// then to the earlier (canonical) variant.
fn nearest_anchor(variant: &Variant, anchors: &[&(Variant, u64)]) -> usize {
    let mut best = 0;
    // compare lev_a / len_a against lev_b / len_b by cross-multiplying
    let mut best_key: Option<(u64, u64, u64)> = None;
    for (idx, (anchor, count)) in anchors.iter().enumerate() {
        let lev = levenshtein(variant, anchor) as u64;
        let len = variant.len().max(anchor.len()) as u64;
        let better = match best_key {
            None => true,
            Some((best_lev, best_len, best_count)) => {
                let (lhs, rhs) = (lev * best_len, best_lev * len);
                lhs < rhs || (lhs == rhs && *count > best_count)
            }
        };
        if better {
            best = idx;
            best_key = Some((lev, len, *count));
        }
    }
    best
}
