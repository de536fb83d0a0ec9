//! Test-only oracles. Nothing here calls into the enumeration, risk or
//! solver code it is used to check.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use pmprivacy::{ActivityId, BkType, EventLog, Exact, Scalar};
use rand::Rng;

pub fn example1() -> EventLog {
    EventLog::from_traces([
        (vec!["a", "b", "c", "d"], 10),
        (vec!["a", "c", "b", "d"], 20),
        (vec!["a", "d", "b", "d"], 5),
        (vec!["a", "b", "d", "d"], 15),
    ])
    .unwrap()
}

pub fn example2_l1() -> EventLog {
    EventLog::from_traces([
        (vec!["a", "b", "c", "d"], 1),
        (vec!["a", "c", "b", "d"], 1),
        (vec!["a", "b", "c", "c", "d"], 1),
        (vec!["a", "b", "b", "c", "d"], 1),
    ])
    .unwrap()
}

pub fn example2_l2() -> EventLog {
    EventLog::from_traces([
        (vec!["a", "b", "c", "d"], 4),
        (vec!["e", "f"], 4),
        (vec!["g", "h"], 4),
    ])
    .unwrap()
}

pub fn example3() -> (EventLog, EventLog) {
    let original = EventLog::from_traces([
        (vec!["a", "b", "c", "d"], 1),
        (vec!["a", "c", "b", "d"], 1),
        (vec!["a", "e", "c", "d"], 49),
        (vec!["a", "e", "b", "d"], 49),
    ])
    .unwrap();
    let anonymized =
        EventLog::from_traces([(vec!["a", "b", "c", "d"], 50), (vec!["a", "c", "b", "d"], 50)])
            .unwrap();
    (original, anonymized)
}

const LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Random log with up to `max_variants` traces drawn over `alphabet` labels.
pub fn random_log<R: Rng>(
    rng: &mut R,
    max_variants: usize,
    alphabet: usize,
    max_len: usize,
    max_count: u64,
) -> EventLog {
    let n = rng.gen_range(1..=max_variants);
    let traces: Vec<(Vec<&str>, u64)> = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let trace = (0..len).map(|_| LABELS[rng.gen_range(0..alphabet)]).collect();
            (trace, rng.gen_range(1..=max_count))
        })
        .collect();
    EventLog::from_traces(traces).unwrap()
}

// ---------------------------------------------------------------- candidates

fn brute_subsequence(needle: &[ActivityId], hay: &[ActivityId]) -> bool {
    if needle.is_empty() {
        return true;
    }
    (0..hay.len()).any(|i| hay[i] == needle[0] && brute_subsequence(&needle[1..], &hay[i + 1..]))
}

fn counts(xs: &[ActivityId]) -> HashMap<ActivityId, usize> {
    let mut m = HashMap::new();
    for &x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

pub fn naive_matches(kind: BkType, candidate: &[ActivityId], trace: &[ActivityId]) -> bool {
    match kind {
        BkType::Set => {
            let have: HashSet<_> = trace.iter().collect();
            candidate.iter().all(|a| have.contains(a))
        }
        BkType::Multiset => {
            let have = counts(trace);
            counts(candidate)
                .into_iter()
                .all(|(a, n)| have.get(&a).copied().unwrap_or(0) >= n)
        }
        BkType::Sequence => brute_subsequence(candidate, trace),
    }
}

/// Every candidate over `alphabet` of the given kind and size, in canonical
/// element form (ascending for set/multiset).
pub fn all_candidates(kind: BkType, alphabet: &[ActivityId], size: usize) -> Vec<Vec<ActivityId>> {
    fn rec(
        kind: BkType,
        alphabet: &[ActivityId],
        size: usize,
        start: usize,
        cur: &mut Vec<ActivityId>,
        out: &mut Vec<Vec<ActivityId>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..alphabet.len() {
            cur.push(alphabet[k]);
            let next = match kind {
                BkType::Set => k + 1,
                BkType::Multiset => k,
                BkType::Sequence => 0,
            };
            rec(kind, alphabet, size, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(kind, alphabet, size, 0, &mut Vec::new(), &mut out);
    out
}

/// `(candidate elements, matching variant positions, cardinality)` for every
/// candidate with a non-empty projection, sorted by elements.
pub fn naive_index(log: &EventLog, kind: BkType, size: usize) -> Vec<(Vec<ActivityId>, Vec<u32>, u64)> {
    let mut out = Vec::new();
    for cand in all_candidates(kind, log.alphabet(), size) {
        let mut members = Vec::new();
        let mut card = 0;
        for (i, (v, c)) in log.variants().iter().enumerate() {
            if naive_matches(kind, &cand, v) {
                members.push(i as u32);
                card += c;
            }
        }
        if card > 0 {
            out.push((cand, members, card));
        }
    }
    out.sort();
    out
}

/// Number of distinct size-`size` patterns of `trace`, by brute force over
/// index subsets.
pub fn distinct_patterns(kind: BkType, trace: &[ActivityId], size: usize) -> usize {
    fn rec(trace: &[ActivityId], size: usize, start: usize, cur: &mut Vec<ActivityId>, out: &mut Vec<Vec<ActivityId>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..trace.len() {
            cur.push(trace[i]);
            rec(trace, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut picks = Vec::new();
    rec(trace, size, 0, &mut Vec::new(), &mut picks);
    let mut seen: HashSet<Vec<ActivityId>> = HashSet::new();
    for mut p in picks {
        match kind {
            BkType::Set => {
                p.sort();
                let len = p.len();
                p.dedup();
                if p.len() != len {
                    continue;
                }
            }
            BkType::Multiset => p.sort(),
            BkType::Sequence => {}
        }
        seen.insert(p);
    }
    seen.len()
}

// ---------------------------------------------------------------- risk

fn entropy_bits(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total as f64;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Direct transcription of the averaged measures: returns `(cd, td)`.
pub fn naive_average_risk(log: &EventLog, kind: BkType, size: usize) -> Option<(f64, f64)> {
    let index = naive_index(log, kind, size);
    if index.is_empty() {
        return None;
    }
    let n = index.len() as f64;
    let mut cd = 0.0;
    let mut kept = 0.0;
    for (_, members, card) in &index {
        cd += (1.0 / *card as f64) / n;
        let cs: Vec<u64> = members.iter().map(|&i| log.variants()[i as usize].1).collect();
        let ratio = if *card == 1 { 0.0 } else { entropy_bits(&cs) / (*card as f64).log2() };
        kept += ratio / n;
    }
    Some((cd, 1.0 - kept))
}

/// Worst-case measures: `(max uniqueness, 1 - min normalized entropy)`.
pub fn naive_worst_risk(log: &EventLog, kind: BkType, size: usize) -> Option<(f64, f64)> {
    let index = naive_index(log, kind, size);
    if index.is_empty() {
        return None;
    }
    let mut cd: f64 = 0.0;
    let mut min_ratio: f64 = 1.0;
    for (_, members, card) in &index {
        cd = cd.max(1.0 / *card as f64);
        let cs: Vec<u64> = members.iter().map(|&i| log.variants()[i as usize].1).collect();
        let ratio = if *card == 1 { 0.0 } else { entropy_bits(&cs) / (*card as f64).log2() };
        min_ratio = min_ratio.min(ratio);
    }
    Some((cd, 1.0 - min_ratio))
}

// ---------------------------------------------------------------- transport

/// A random balanced problem with rational masses and costs, as exact
/// values: `(supplies, demands, row-major costs)`.
pub fn random_problem<R: Rng>(rng: &mut R, max_side: usize) -> (Vec<Exact>, Vec<Exact>, Vec<Exact>) {
    let m = rng.gen_range(1..=max_side);
    let n = rng.gen_range(1..=max_side);
    let masses = |rng: &mut R, k: usize| {
        let counts: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=20)).collect();
        let total: u64 = counts.iter().sum();
        counts
            .into_iter()
            .map(|c| Exact::from_ratio(c, total))
            .collect::<Vec<_>>()
    };
    let supplies = masses(rng, m);
    let demands = masses(rng, n);
    let den = rng.gen_range(1..=8u64);
    let costs = (0..m * n)
        .map(|_| Exact::from_ratio(rng.gen_range(0..=den), den))
        .collect();
    (supplies, demands, costs)
}

pub fn to_f64(xs: &[Exact]) -> Vec<f64> {
    xs.iter().map(Scalar::to_f64).collect()
}

/// Optimal value of `min c.x  s.t.  row sums = supplies, column sums =
/// demands, x >= 0`, via a dense two-phase tableau simplex over exact
/// rationals with Bland's rule. Written against the generic LP form, not
/// the transportation structure.
pub fn lp_oracle(supplies: &[Exact], demands: &[Exact], costs: &[Exact]) -> Exact {
    let (m, n) = (supplies.len(), demands.len());
    let vars = m * n;
    let rows = m + n;
    let width = vars + rows + 1; // structural, artificial, rhs
    let rhs = width - 1;
    let mut t: Vec<Vec<Exact>> = vec![vec![Exact::zero(); width]; rows];
    for i in 0..m {
        for j in 0..n {
            t[i][i * n + j] = Exact::one();
            t[m + j][i * n + j] = Exact::one();
        }
    }
    for r in 0..rows {
        t[r][vars + r] = Exact::one();
        t[r][rhs] = if r < m { supplies[r].clone() } else { demands[r - m].clone() };
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    let phase1: Vec<Exact> = (0..width - 1)
        .map(|j| if j >= vars { Exact::one() } else { Exact::zero() })
        .collect();
    run_bland(&mut t, &mut basis, &phase1, width - 1);

    // drive zero-level artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.len() {
        if basis[r] >= vars {
            assert!(t[r][rhs].is_zero(), "transport LP infeasible");
            match (0..vars).find(|&j| !t[r][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, r, j),
                None => {
                    t.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut phase2: Vec<Exact> = costs.to_vec();
    phase2.extend((0..rows).map(|_| Exact::zero()));
    run_bland(&mut t, &mut basis, &phase2, vars);

    basis
        .iter()
        .enumerate()
        .map(|(r, &b)| phase2[b].clone() * t[r][rhs].clone())
        .fold(Exact::zero(), |a, b| a + b)
}

fn pivot(t: &mut [Vec<Exact>], basis: &mut [usize], r: usize, col: usize) {
    let p = t[r][col].clone();
    for x in t[r].iter_mut() {
        *x = x.clone() / p.clone();
    }
    let pivot_row = t[r].clone();
    for (k, row) in t.iter_mut().enumerate() {
        if k == r || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for (x, y) in row.iter_mut().zip(&pivot_row) {
            *x = x.clone() - f.clone() * y.clone();
        }
    }
    basis[r] = col;
}

/// Minimizes `cost` over the tableau; only columns `< allowed` may enter.
fn run_bland(t: &mut [Vec<Exact>], basis: &mut [usize], cost: &[Exact], allowed: usize) {
    let rhs = t[0].len() - 1;
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z = basis
                .iter()
                .enumerate()
                .fold(Exact::zero(), |acc, (r, &b)| acc + cost[b].clone() * t[r][j].clone());
            (cost[j].clone() - z).is_negative()
        });
        let Some(col) = entering else { return };
        let mut best: Option<(usize, Exact)> = None;
        for r in 0..t.len() {
            if t[r][col].is_positive() {
                let ratio = t[r][rhs].clone() / t[r][col].clone();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        let (r, _) = best.expect("transport LP is bounded");
        pivot(t, basis, r, col);
    }
}

/// North-west corner plan objective: a feasible, generally suboptimal
/// reallocation.
pub fn north_west_objective(supplies: &[Exact], demands: &[Exact], costs: &[Exact]) -> Exact {
    let (m, n) = (supplies.len(), demands.len());
    let (mut s, mut d) = (supplies.to_vec(), demands.to_vec());
    let (mut i, mut j) = (0, 0);
    let mut total = Exact::zero();
    while i < m && j < n {
        let f = if s[i] < d[j] { s[i].clone() } else { d[j].clone() };
        total += f.clone() * costs[i * n + j].clone();
        s[i] = s[i].clone() - f.clone();
        d[j] = d[j].clone() - f;
        if s[i].is_zero() {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}
