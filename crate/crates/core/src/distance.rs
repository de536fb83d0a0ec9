//! Ground cost between traces: Levenshtein distance normalized by the longer
//! trace. Unit costs for insertion, deletion and substitution; no
//! transpositions.

use crate::event_log::ActivityId;
use crate::scalar::Scalar;

/// Minimal number of single-activity insertions, deletions and
/// substitutions turning `a` into `b`.
pub fn levenshtein(a: &[ActivityId], b: &[ActivityId]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if x == y {
                diag
            } else {
                1 + diag.min(above).min(row[j])
            };
            diag = above;
        }
    }
    row[b.len()]
}

/// `levenshtein(a, b) / max(|a|, |b|)`, in `[0, 1]`. Zero for two empty
/// sequences.
pub fn normalized_distance<T: Scalar>(a: &[ActivityId], b: &[ActivityId]) -> T {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return T::zero();
    }
    T::from_ratio(levenshtein(a, b) as u64, longest as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn ids(s: &str) -> Vec<ActivityId> {
        s.bytes().map(|b| ActivityId(b as u32)).collect()
    }

    #[test]
    fn raw_distances() {
        assert_eq!(levenshtein(&ids("abcd"), &ids("abcd")), 0);
        assert_eq!(levenshtein(&ids("abcd"), &ids("aecd")), 1);
        assert_eq!(levenshtein(&ids("abcd"), &ids("acbd")), 2);
        assert_eq!(levenshtein(&ids("kitten"), &ids("sitting")), 3);
        assert_eq!(levenshtein(&ids(""), &ids("abc")), 3);
    }

    #[test]
    fn normalized_by_longer_trace() {
        assert_eq!(normalized_distance::<f64>(&ids("abcd"), &ids("aecd")), 0.25);
        assert_eq!(normalized_distance::<f64>(&ids("abcd"), &ids("acbd")), 0.5);
        assert_eq!(normalized_distance::<f64>(&ids("acbd"), &ids("aecd")), 0.5);
        assert_eq!(
            normalized_distance::<Exact>(&ids("ab"), &ids("abcd")),
            Exact::from_ratio(1, 2)
        );
        assert_eq!(normalized_distance::<f64>(&ids("a"), &ids("b")), 1.0);
    }
}
