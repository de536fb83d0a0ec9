//! Simple event logs: activity interning, raw events, variants and the
//! variant multiset, plus frequency and entropy primitives.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Interned activity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivityId(pub u32);

impl ActivityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActivityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An activity of a log universe: its interned id and label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Activity<'a> {
    pub id: ActivityId,
    pub label: &'a str,
}

/// Bijective label <-> id interning for one log universe. Labels are matched
/// byte-exact and case-sensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActivityTable {
    labels: Vec<String>,
    index: HashMap<String, ActivityId>,
}

impl ActivityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> Result<ActivityId> {
        if label.is_empty() {
            return Err(Error::Input("activity label must be non-empty".into()));
        }
        if let Some(&id) = self.index.get(label) {
            return Ok(id);
        }
        let id = ActivityId(
            u32::try_from(self.labels.len())
                .map_err(|_| Error::Input("too many distinct activities".into()))?,
        );
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        Ok(id)
    }

    pub fn get(&self, label: &str) -> Option<ActivityId> {
        self.index.get(label).copied()
    }

    /// Panics if `id` was not produced by this table.
    pub fn label(&self, id: ActivityId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = Activity<'_>> {
        self.labels.iter().enumerate().map(|(i, label)| Activity {
            id: ActivityId(i as u32),
            label,
        })
    }

    /// True when ids issued by `self` and `other` agree on every label both
    /// tables know, i.e. one label list is a prefix of the other.
    pub fn is_compatible_with(&self, other: &ActivityTable) -> bool {
        let n = self.labels.len().min(other.labels.len());
        self.labels[..n] == other.labels[..n]
    }
}

/// One row of input: `(case, activity, timestamp)` plus its input position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEvent {
    pub case_id: String,
    pub activity: String,
    pub timestamp: DateTime<Utc>,
    pub source_index: usize,
}

/// A simple trace: the ordered activities of one case. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variant(Vec<ActivityId>);

impl Variant {
    pub fn new(activities: Vec<ActivityId>) -> Result<Self> {
        if activities.is_empty() {
            return Err(Error::Input("empty trace".into()));
        }
        Ok(Variant(activities))
    }

    pub fn activities(&self) -> &[ActivityId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for Variant {
    type Target = [ActivityId];

    fn deref(&self) -> &[ActivityId] {
        &self.0
    }
}

/// A simple event log: a multiset of non-empty variants.
///
/// Variants are kept in canonical order (lexicographic by activity id) and
/// are unique; every count is at least one. The log is immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    activities: Arc<ActivityTable>,
    variants: Vec<(Variant, u64)>,
    total_traces: u64,
    alphabet: Vec<ActivityId>,
}

impl EventLog {
    /// Builds a log from `(variant, count)` pairs. Duplicate variants are
    /// merged; zero counts are rejected.
    pub fn from_variants<I>(activities: Arc<ActivityTable>, variants: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Variant, u64)>,
    {
        let mut merged: HashMap<Variant, u64> = HashMap::new();
        for (variant, count) in variants {
            if count == 0 {
                return Err(Error::Input("variant count must be at least one".into()));
            }
            if let Some(&a) = variant.iter().find(|a| a.index() >= activities.len()) {
                return Err(Error::Input(format!("unknown activity id {a}")));
            }
            *merged.entry(variant).or_insert(0) += count;
        }
        if merged.is_empty() {
            return Err(Error::Input("event log contains no traces".into()));
        }
        let mut variants: Vec<(Variant, u64)> = merged.into_iter().collect();
        variants.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total_traces = variants.iter().map(|(_, c)| c).sum();

        let mut seen = vec![false; activities.len()];
        for (v, _) in &variants {
            for a in v.iter() {
                seen[a.index()] = true;
            }
        }
        let alphabet = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| ActivityId(i as u32))
            .collect();

        Ok(EventLog {
            activities,
            variants,
            total_traces,
            alphabet,
        })
    }

    /// Builds a log (with its own activity table) from labelled traces.
    ///
    /// ```
    /// use pmprivacy::EventLog;
    /// let log = EventLog::from_traces([(vec!["a", "b"], 2), (vec!["a"], 1)]).unwrap();
    /// assert_eq!(log.total_traces(), 3);
    /// ```
    pub fn from_traces<I, T, S>(traces: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, u64)>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = ActivityTable::new();
        let mut variants = Vec::new();
        for (trace, count) in traces {
            let ids = trace
                .into_iter()
                .map(|label| table.intern(label.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            variants.push((Variant::new(ids)?, count));
        }
        Self::from_variants(Arc::new(table), variants)
    }

    /// A new log over the same activity universe.
    pub fn with_variants<I>(&self, variants: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Variant, u64)>,
    {
        Self::from_variants(Arc::clone(&self.activities), variants)
    }

    pub fn activities(&self) -> &Arc<ActivityTable> {
        &self.activities
    }

    /// Variants with their counts, in canonical order.
    pub fn variants(&self) -> &[(Variant, u64)] {
        &self.variants
    }

    pub fn n_variants(&self) -> usize {
        self.variants.len()
    }

    pub fn total_traces(&self) -> u64 {
        self.total_traces
    }

    /// Activities occurring in at least one trace, sorted by id.
    pub fn alphabet(&self) -> &[ActivityId] {
        &self.alphabet
    }

    pub fn count(&self, variant: &Variant) -> Option<u64> {
        self.position(variant).map(|i| self.variants[i].1)
    }

    /// Index of `variant` in [`EventLog::variants`].
    pub fn position(&self, variant: &Variant) -> Option<usize> {
        self.variants
            .binary_search_by(|(v, _)| v.cmp(variant))
            .ok()
    }

    pub fn labels<'a>(&'a self, variant: &'a Variant) -> impl Iterator<Item = &'a str> + 'a {
        variant.iter().map(|&a| self.activities.label(a))
    }

    /// Interns `labels` against this log's universe; `None` if any label is
    /// unknown or the sequence is empty.
    pub fn variant_of<S: AsRef<str>>(&self, labels: &[S]) -> Option<Variant> {
        let ids = labels
            .iter()
            .map(|l| self.activities.get(l.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        Variant::new(ids).ok()
    }

    /// Comma-separated labels, for reports.
    pub fn format_variant(&self, variant: &Variant) -> String {
        self.labels(variant).collect::<Vec<_>>().join(",")
    }
}

/// Groups events by case, orders each case by `(timestamp, source_index)`
/// and aggregates the resulting traces. Activities are interned in sorted
/// label order so the result does not depend on the input order.
pub fn build_log(events: &[RawEvent]) -> Result<EventLog> {
    let mut labels: Vec<&str> = events.iter().map(|e| e.activity.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut table = ActivityTable::new();
    for l in labels {
        table.intern(l)?;
    }
    build_log_with(&mut table, events)
}

/// Like [`build_log`] but interning into a caller-provided table, so several
/// logs can share one activity universe.
pub fn build_log_with(table: &mut ActivityTable, events: &[RawEvent]) -> Result<EventLog> {
    if events.is_empty() {
        return Err(Error::Input("no events to build a log from".into()));
    }
    let mut cases: HashMap<&str, Vec<&RawEvent>> = HashMap::new();
    for e in events {
        if e.case_id.is_empty() {
            return Err(Error::Input(format!(
                "event {} has an empty case id",
                e.source_index
            )));
        }
        cases.entry(e.case_id.as_str()).or_default().push(e);
    }
    let mut variants = Vec::with_capacity(cases.len());
    for (_, mut case_events) in cases {
        case_events.sort_by(|a, b| {
            a.timestamp
                .cmp(&b.timestamp)
                .then(a.source_index.cmp(&b.source_index))
        });
        let ids = case_events
            .iter()
            .map(|e| table.intern(&e.activity))
            .collect::<Result<Vec<_>>>()?;
        variants.push((Variant::new(ids)?, 1));
    }
    EventLog::from_variants(Arc::new(table.clone()), variants)
}

/// Relative frequency `count(v) / |L|`.
pub fn trace_frequency<T: Scalar>(log: &EventLog, variant: &Variant) -> Result<T> {
    let count = log
        .count(variant)
        .ok_or_else(|| Error::Domain("variant does not occur in the log".into()))?;
    Ok(T::from_ratio(count, log.total_traces()))
}

/// Shannon entropy (bits) of a distribution given by positive counts.
pub(crate) fn entropy_of_counts<T: Real>(counts: impl Iterator<Item = u64>, total: u64) -> T {
    let total_t = T::from_u64(total).unwrap();
    let mut h = T::zero();
    for c in counts {
        let p = T::from_u64(c).unwrap() / total_t;
        h = h - p * p.log2();
    }
    // -0.0 for a single variant
    h.max(T::zero())
}

/// Entropy of the variant distribution, in bits.
pub fn log_entropy<T: Real>(log: &EventLog) -> T {
    entropy_of_counts(
        log.variants().iter().map(|(_, c)| *c),
        log.total_traces(),
    )
}

/// Entropy reached when every trace is unique: `log2 |L|`.
pub fn max_entropy<T: Real>(log: &EventLog) -> T {
    T::from_u64(log.total_traces()).unwrap().log2()
}

/// General statistics of a log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogStats<T = f64> {
    pub n_traces: u64,
    pub n_variants: u64,
    pub n_events: u64,
    pub n_unique_activities: u64,
    /// `n_variants / n_traces`.
    pub trace_uniqueness: T,
}

pub fn stats<T: Scalar>(log: &EventLog) -> LogStats<T> {
    LogStats {
        n_traces: log.total_traces(),
        n_variants: log.n_variants() as u64,
        n_events: log
            .variants()
            .iter()
            .map(|(v, c)| v.len() as u64 * c)
            .sum(),
        n_unique_activities: log.alphabet().len() as u64,
        trace_uniqueness: T::from_ratio(log.n_variants() as u64, log.total_traces()),
    }
}
