//! Case (identity) disclosure and trace (attribute) disclosure.
//!
//! Case disclosure averages the uniqueness `1 / |proj(x)|` over all
//! candidates `x`. Trace disclosure is one minus the average normalized
//! entropy `ent(proj(x)) / log2 |proj(x)|` of the matching traces. A
//! projection holding a single trace has normalized entropy 0: the trace is
//! fully determined. Both measures can alternatively be taken in the worst
//! case (maximal uniqueness, minimal entropy).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::background::{enumerate, BkType, CandidateIndex, ProjectionRef};
use crate::error::{Error, Result};
use crate::event_log::{entropy_of_counts, stats, EventLog, LogStats};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Aggregation {
    #[default]
    Average,
    Worst,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Average => "average",
            Aggregation::Worst => "worst",
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" | "mean" => Ok(Aggregation::Average),
            "worst" | "max" => Ok(Aggregation::Worst),
            other => Err(Error::Config(format!(
                "unknown aggregation '{other}' (expected average or worst)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskScore<T = f64> {
    pub bk_type: BkType,
    pub size: usize,
    pub cd: T,
    pub td: T,
    pub n_candidates: usize,
    pub aggregation: Aggregation,
}

fn require_candidates(index: &CandidateIndex) -> Result<()> {
    if index.is_empty() {
        Err(Error::NoCandidates {
            bk_type: index.bk_type(),
            size: index.size(),
        })
    } else {
        Ok(())
    }
}

fn from_u64<T: Real>(n: u64) -> T {
    T::from_u64(n).expect("count representable as float")
}

/// `ent / max_ent` for one projection, in `[0, 1]`; 0 for a single trace.
pub fn normalized_entropy<T: Real>(projection: &ProjectionRef<'_>) -> T {
    let cardinality = projection.cardinality();
    if cardinality <= 1 {
        return T::zero();
    }
    let ent: T = entropy_of_counts(projection.counts(), cardinality);
    let max_ent = from_u64::<T>(cardinality).log2();
    (ent / max_ent).max(T::zero()).min(T::one())
}

pub fn case_disclosure<T: Real>(index: &CandidateIndex, aggregation: Aggregation) -> Result<T> {
    require_candidates(index)?;
    let uniqueness = index
        .cardinalities()
        .iter()
        .map(|&c| T::one() / from_u64::<T>(c));
    Ok(match aggregation {
        Aggregation::Average => {
            let total = uniqueness.fold(T::zero(), |acc, u| acc + u);
            (total / from_u64::<T>(index.len() as u64)).min(T::one())
        }
        Aggregation::Worst => uniqueness.fold(T::zero(), T::max),
    })
}

pub fn trace_disclosure<T: Real>(index: &CandidateIndex, aggregation: Aggregation) -> Result<T> {
    require_candidates(index)?;
    let ratios = index.iter().map(|(_, p)| normalized_entropy::<T>(&p));
    let kept = match aggregation {
        Aggregation::Average => {
            let total = ratios.fold(T::zero(), |acc, r| acc + r);
            total / from_u64::<T>(index.len() as u64)
        }
        Aggregation::Worst => ratios.fold(T::one(), T::min),
    };
    Ok((T::one() - kept).max(T::zero()).min(T::one()))
}

/// Both measures for one index.
pub fn score<T: Real>(index: &CandidateIndex, aggregation: Aggregation) -> Result<RiskScore<T>> {
    Ok(RiskScore {
        bk_type: index.bk_type(),
        size: index.size(),
        cd: case_disclosure(index, aggregation)?,
        td: trace_disclosure(index, aggregation)?,
        n_candidates: index.len(),
        aggregation,
    })
}

/// Outcome of one `(type, size)` cell of a risk profile.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskCell<T = f64> {
    Score(RiskScore<T>),
    /// No trace has a pattern of this size.
    NoCandidates,
    /// Enumeration hit the candidate cap.
    ResourceLimit { reached: usize, cap: usize },
}

impl<T> RiskCell<T> {
    pub fn score(&self) -> Option<&RiskScore<T>> {
        match self {
            RiskCell::Score(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile<T = f64> {
    pub cells: BTreeMap<(BkType, usize), RiskCell<T>>,
    pub aggregation: Aggregation,
    /// Statistics of the log the profile was computed on.
    pub log_stats: LogStats<T>,
}

impl<T> RiskProfile<T> {
    pub fn get(&self, bk_type: BkType, size: usize) -> Option<&RiskScore<T>> {
        self.cells.get(&(bk_type, size)).and_then(RiskCell::score)
    }
}

/// Risk over a `types x sizes` grid. Cells whose enumeration exceeds `cap`
/// or that have no candidates are recorded as such; the other cells are
/// still computed.
pub fn risk_profile<T: Real>(
    log: &EventLog,
    types: &[BkType],
    sizes: &[usize],
    aggregation: Aggregation,
    cap: usize,
) -> Result<RiskProfile<T>> {
    if sizes.is_empty() || types.is_empty() {
        return Err(Error::Config("risk profile needs at least one type and one size".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::Config("background knowledge size must be at least 1".into()));
    }
    let mut cells = BTreeMap::new();
    for &bk_type in types {
        for &size in sizes {
            let cell = match enumerate(log, bk_type, size, cap) {
                Ok(index) if index.is_empty() => RiskCell::NoCandidates,
                Ok(index) => RiskCell::Score(score(&index, aggregation)?),
                Err(Error::ResourceLimit { reached, cap, .. }) => {
                    RiskCell::ResourceLimit { reached, cap }
                }
                Err(e) => return Err(e),
            };
            cells.insert((bk_type, size), cell);
        }
    }
    Ok(RiskProfile {
        cells,
        aggregation,
        log_stats: stats(log),
    })
}
