//! Background knowledge: candidates, projections and candidate enumeration.
//!
//! An adversary knows a set, a multiset or a (not necessarily contiguous)
//! subsequence of `l` activities of a victim's trace. A candidate is one such
//! piece of knowledge; its projection is the multiset of log traces that are
//! consistent with it.
//!
//! Enumeration never walks the full `|A_L|^l` space. A candidate has a
//! non-empty projection iff some variant contains it, so candidates are
//! generated from the variants themselves and deduplicated globally. Each
//! variant contributes to a candidate at most once.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::event_log::{ActivityId, EventLog, Variant};

/// Default maximum number of candidates per `(type, size)`.
pub const DEFAULT_CANDIDATE_CAP: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BkType {
    Set,
    Multiset,
    Sequence,
}

impl BkType {
    pub const ALL: [BkType; 3] = [BkType::Set, BkType::Multiset, BkType::Sequence];

    pub fn as_str(self) -> &'static str {
        match self {
            BkType::Set => "set",
            BkType::Multiset => "mult",
            BkType::Sequence => "seq",
        }
    }
}

impl fmt::Display for BkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BkType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "set" => Ok(BkType::Set),
            "mult" | "multiset" => Ok(BkType::Multiset),
            "seq" | "sequence" => Ok(BkType::Sequence),
            other => Err(Error::Config(format!(
                "unknown background knowledge type '{other}' (expected set, mult or seq)"
            ))),
        }
    }
}

pub(crate) type Pattern = SmallVec<[ActivityId; 8]>;

/// Candidates sharing one first element, with their matching variants;
/// `None` once the cap was hit.
type Partition = Option<Vec<(Pattern, Vec<u32>)>>;

/// One piece of background knowledge.
///
/// Elements are stored canonically: sorted and duplicate-free for sets,
/// sorted with repetitions for multisets, in trace order for sequences.
/// Ordering is by kind, then lexicographically by element ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    kind: BkType,
    elements: Pattern,
}

impl Candidate {
    pub fn set(elements: impl IntoIterator<Item = ActivityId>) -> Self {
        let mut elements: Pattern = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Candidate {
            kind: BkType::Set,
            elements,
        }
    }

    pub fn multiset(elements: impl IntoIterator<Item = ActivityId>) -> Self {
        let mut elements: Pattern = elements.into_iter().collect();
        elements.sort_unstable();
        Candidate {
            kind: BkType::Multiset,
            elements,
        }
    }

    pub fn sequence(elements: impl IntoIterator<Item = ActivityId>) -> Self {
        Candidate {
            kind: BkType::Sequence,
            elements: elements.into_iter().collect(),
        }
    }

    /// Builds a candidate of `kind` from raw elements, canonicalizing them.
    pub fn of_kind(kind: BkType, elements: impl IntoIterator<Item = ActivityId>) -> Self {
        match kind {
            BkType::Set => Self::set(elements),
            BkType::Multiset => Self::multiset(elements),
            BkType::Sequence => Self::sequence(elements),
        }
    }

    /// Looks labels up in `log`'s activity table. `None` if one is unknown.
    pub fn from_labels<S: AsRef<str>>(log: &EventLog, kind: BkType, labels: &[S]) -> Option<Self> {
        let ids = labels
            .iter()
            .map(|l| log.activities().get(l.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::of_kind(kind, ids))
    }

    fn from_pattern(kind: BkType, elements: Pattern) -> Self {
        Candidate { kind, elements }
    }

    pub fn kind(&self) -> BkType {
        self.kind
    }

    pub fn elements(&self) -> &[ActivityId] {
        &self.elements
    }

    /// Size `l`, counting multiplicity.
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// `(activity, multiplicity)` pairs in id order.
    pub fn multiplicities(&self) -> Vec<(ActivityId, usize)> {
        let mut sorted: Pattern = self.elements.clone();
        sorted.sort_unstable();
        let mut out: Vec<(ActivityId, usize)> = Vec::new();
        for a in sorted {
            match out.last_mut() {
                Some((last, n)) if *last == a => *n += 1,
                _ => out.push((a, 1)),
            }
        }
        out
    }

    /// Human-readable form: `{a,b}`, `[b,d^2]` or `<b,d,d>`.
    pub fn display(&self, log: &EventLog) -> String {
        let table = log.activities();
        match self.kind {
            BkType::Set => {
                let parts: Vec<_> = self.elements.iter().map(|&a| table.label(a)).collect();
                format!("{{{}}}", parts.join(","))
            }
            BkType::Multiset => {
                let parts: Vec<_> = self
                    .multiplicities()
                    .into_iter()
                    .map(|(a, n)| match n {
                        1 => table.label(a).to_owned(),
                        n => format!("{}^{n}", table.label(a)),
                    })
                    .collect();
                format!("[{}]", parts.join(","))
            }
            BkType::Sequence => {
                let parts: Vec<_> = self.elements.iter().map(|&a| table.label(a)).collect();
                format!("<{}>", parts.join(","))
            }
        }
    }
}

/// Does `variant` agree with the background knowledge `candidate`?
pub fn matches(candidate: &Candidate, variant: &Variant) -> bool {
    match candidate.kind {
        BkType::Set => candidate.elements.iter().all(|a| variant.contains(a)),
        BkType::Multiset => candidate
            .multiplicities()
            .into_iter()
            .all(|(a, n)| variant.iter().filter(|&&b| b == a).count() >= n),
        BkType::Sequence => is_subsequence(&candidate.elements, variant),
    }
}

fn is_subsequence(needle: &[ActivityId], haystack: &[ActivityId]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|a| it.any(|b| b == a))
}

/// The traces matching one candidate, as positions into the log's variant
/// list (ascending) plus the multiplicity-weighted size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub variants: Vec<u32>,
    pub cardinality: u64,
}

impl Projection {
    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    /// `(variant, count)` pairs resolved against `log`.
    pub fn resolve<'a>(&'a self, log: &'a EventLog) -> impl Iterator<Item = (&'a Variant, u64)> + 'a {
        self.variants.iter().map(move |&i| {
            let (v, c) = &log.variants()[i as usize];
            (v, *c)
        })
    }
}

/// `proj(candidate)` over `log`. An empty result is valid here.
pub fn project(log: &EventLog, candidate: &Candidate) -> Projection {
    let mut variants = Vec::new();
    let mut cardinality = 0;
    for (i, (v, c)) in log.variants().iter().enumerate() {
        if matches(candidate, v) {
            variants.push(i as u32);
            cardinality += c;
        }
    }
    Projection {
        variants,
        cardinality,
    }
}

/// Borrowed projection stored inside a [`CandidateIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionRef<'a> {
    variants: &'a [u32],
    cardinality: u64,
    variant_counts: &'a [u64],
}

impl<'a> ProjectionRef<'a> {
    pub fn variants(&self) -> &'a [u32] {
        self.variants
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    /// Trace counts of the matching variants.
    pub fn counts(&self) -> impl Iterator<Item = u64> + 'a {
        let counts = self.variant_counts;
        self.variants.iter().map(move |&i| counts[i as usize])
    }

    pub fn to_projection(&self) -> Projection {
        Projection {
            variants: self.variants.to_vec(),
            cardinality: self.cardinality,
        }
    }
}

/// All candidates of one type and size with a non-empty projection, in
/// canonical candidate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateIndex {
    bk_type: BkType,
    size: usize,
    candidates: Vec<Candidate>,
    // CSR layout: candidate i matches members[offsets[i]..offsets[i + 1]]
    offsets: Vec<usize>,
    members: Vec<u32>,
    cardinalities: Vec<u64>,
    variant_counts: Vec<u64>,
}

impl CandidateIndex {
    pub fn bk_type(&self) -> BkType {
        self.bk_type
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn projection(&self, i: usize) -> ProjectionRef<'_> {
        ProjectionRef {
            variants: &self.members[self.offsets[i]..self.offsets[i + 1]],
            cardinality: self.cardinalities[i],
            variant_counts: &self.variant_counts,
        }
    }

    pub fn get(&self, candidate: &Candidate) -> Option<ProjectionRef<'_>> {
        self.candidates
            .binary_search(candidate)
            .ok()
            .map(|i| self.projection(i))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&Candidate, ProjectionRef<'_>)> + '_ {
        self.candidates
            .iter()
            .enumerate()
            .map(move |(i, c)| (c, self.projection(i)))
    }

    /// Cardinalities in canonical candidate order.
    pub fn cardinalities(&self) -> &[u64] {
        &self.cardinalities
    }

    /// Writes `candidate,cardinality` rows in canonical order.
    pub fn write_csv<W: Write>(&self, log: &EventLog, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["candidate", "cardinality"]).map_err(to_io)?;
        for (c, p) in self.iter() {
            w.write_record([c.display(log), p.cardinality().to_string()])
                .map_err(to_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds `cand_type^l(L)` with every candidate's projection.
///
/// Work is split by the candidate's first element (the smallest id for sets
/// and multisets), so the per-worker key spaces are disjoint and the result
/// is the concatenation of sorted partitions; scheduling cannot change it.
/// Fails with [`Error::ResourceLimit`] as soon as more than `cap` distinct
/// candidates have been produced.
pub fn enumerate(log: &EventLog, bk_type: BkType, size: usize, cap: usize) -> Result<CandidateIndex> {
    if size == 0 {
        return Err(Error::Config("background knowledge size must be at least 1".into()));
    }
    if cap == 0 {
        return Err(Error::Config("candidate cap must be at least 1".into()));
    }

    let profiles: Vec<VariantProfile> = log
        .variants()
        .iter()
        .map(|(v, _)| VariantProfile::new(v))
        .collect();
    let distinct = AtomicUsize::new(0);
    let exceeded = AtomicBool::new(false);

    let partitions: Vec<Partition> = log
        .alphabet()
        .par_iter()
        .map(|&first| {
            let mut local: FxHashMap<Pattern, Vec<u32>> = FxHashMap::default();
            let mut buf = Pattern::new();
            for (vi, profile) in profiles.iter().enumerate() {
                if exceeded.load(Ordering::Relaxed) {
                    return None;
                }
                let vi = vi as u32;
                profile.generate(bk_type, size, first, &mut buf, &mut |pattern| {
                    match local.get_mut(pattern) {
                        Some(members) => members.push(vi),
                        None => {
                            local.insert(Pattern::from_slice(pattern), vec![vi]);
                            if distinct.fetch_add(1, Ordering::Relaxed) + 1 > cap {
                                exceeded.store(true, Ordering::Relaxed);
                            }
                        }
                    }
                });
            }
            let mut part: Vec<(Pattern, Vec<u32>)> = local.into_iter().collect();
            part.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            Some(part)
        })
        .collect();

    if exceeded.load(Ordering::Relaxed) {
        return Err(Error::ResourceLimit {
            bk_type,
            size,
            reached: distinct.load(Ordering::Relaxed),
            cap,
        });
    }

    let variant_counts: Vec<u64> = log.variants().iter().map(|(_, c)| *c).collect();
    let total: usize = partitions.iter().flatten().map(Vec::len).sum();
    let mut candidates = Vec::with_capacity(total);
    let mut offsets = Vec::with_capacity(total + 1);
    let mut cardinalities = Vec::with_capacity(total);
    let mut members = Vec::new();
    offsets.push(0);
    for (pattern, list) in partitions.into_iter().flatten().flatten() {
        cardinalities.push(list.iter().map(|&i| variant_counts[i as usize]).sum());
        members.extend_from_slice(&list);
        offsets.push(members.len());
        candidates.push(Candidate::from_pattern(bk_type, pattern));
    }

    Ok(CandidateIndex {
        bk_type,
        size,
        candidates,
        offsets,
        members,
        cardinalities,
        variant_counts,
    })
}

/// Per-variant tables used by candidate generation.
struct VariantProfile {
    /// Distinct activities, ascending, with their multiplicities.
    distinct: Vec<(ActivityId, usize)>,
    /// `next[pos * k + j]`: first position `>= pos` holding `distinct[j].0`,
    /// or `len` if none. Row `len` is all-`len`.
    next: Vec<u32>,
    len: usize,
}

impl VariantProfile {
    fn new(variant: &Variant) -> Self {
        let mut distinct: Vec<(ActivityId, usize)> = Vec::new();
        let mut sorted: Vec<ActivityId> = variant.to_vec();
        sorted.sort_unstable();
        for a in sorted {
            match distinct.last_mut() {
                Some((last, n)) if *last == a => *n += 1,
                _ => distinct.push((a, 1)),
            }
        }
        let len = variant.len();
        let k = distinct.len();
        let mut next = vec![len as u32; (len + 1) * k];
        for pos in (0..len).rev() {
            let (row, rest) = next.split_at_mut((pos + 1) * k);
            row[pos * k..].copy_from_slice(&rest[..k]);
            let j = distinct.binary_search_by(|(a, _)| a.cmp(&variant[pos])).unwrap();
            row[pos * k + j] = pos as u32;
        }
        VariantProfile {
            distinct,
            next,
            len,
        }
    }

    /// Calls `emit` once for every distinct size-`size` pattern of this
    /// variant whose first element is `first`.
    fn generate(
        &self,
        kind: BkType,
        size: usize,
        first: ActivityId,
        buf: &mut Pattern,
        emit: &mut dyn FnMut(&[ActivityId]),
    ) {
        let Ok(j) = self.distinct.binary_search_by(|(a, _)| a.cmp(&first)) else {
            return;
        };
        buf.clear();
        match kind {
            BkType::Set => {
                if self.distinct.len() - j < size {
                    return;
                }
                buf.push(first);
                self.sets_from(j + 1, size - 1, buf, emit);
            }
            BkType::Multiset => {
                let available = self.distinct[j].1;
                for m in 1..=available.min(size) {
                    buf.truncate(0);
                    buf.extend(std::iter::repeat_n(first, m));
                    self.multisets_from(j + 1, size - m, buf, emit);
                }
            }
            BkType::Sequence => {
                // row 0 of `next` holds first occurrences
                let pos = self.next[j] as usize;
                if self.len - pos < size {
                    return;
                }
                buf.push(first);
                self.subsequences_from(pos + 1, size - 1, buf, emit);
            }
        }
    }

    fn sets_from(&self, start: usize, remaining: usize, buf: &mut Pattern, emit: &mut dyn FnMut(&[ActivityId])) {
        if remaining == 0 {
            emit(buf);
            return;
        }
        let n = self.distinct.len();
        for j in start..n {
            if n - j < remaining {
                break;
            }
            buf.push(self.distinct[j].0);
            self.sets_from(j + 1, remaining - 1, buf, emit);
            buf.pop();
        }
    }

    fn multisets_from(&self, start: usize, remaining: usize, buf: &mut Pattern, emit: &mut dyn FnMut(&[ActivityId])) {
        if remaining == 0 {
            emit(buf);
            return;
        }
        for j in start..self.distinct.len() {
            let (a, available) = self.distinct[j];
            for m in 1..=available.min(remaining) {
                buf.push(a);
                self.multisets_from(j + 1, remaining - m, buf, emit);
            }
            for _ in 0..available.min(remaining) {
                buf.pop();
            }
        }
    }

    /// Distinct subsequences via leftmost embeddings: every distinct
    /// subsequence has exactly one, so each is emitted once.
    fn subsequences_from(&self, pos: usize, remaining: usize, buf: &mut Pattern, emit: &mut dyn FnMut(&[ActivityId])) {
        if remaining == 0 {
            emit(buf);
            return;
        }
        let k = self.distinct.len();
        let row = &self.next[pos * k..(pos + 1) * k];
        for (j, &q) in row.iter().enumerate() {
            let q = q as usize;
            if q >= self.len || self.len - q < remaining {
                continue;
            }
            buf.push(self.distinct[j].0);
            self.subsequences_from(q + 1, remaining - 1, buf, emit);
            buf.pop();
        }
    }
}
