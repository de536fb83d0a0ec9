mod common;

use common::{naive_average_risk, naive_worst_risk, random_log};
use pmprivacy::{
    case_disclosure, enumerate, risk_profile, score, trace_disclosure, Aggregation, BkType,
    EventLog, RiskCell, DEFAULT_CANDIDATE_CAP,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn agrees_with_direct_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd15c);
    for _ in 0..200 {
        let log = random_log(&mut rng, 6, 5, 6, 5);
        for kind in BkType::ALL {
            for size in 1..=3 {
                let index = enumerate(&log, kind, size, DEFAULT_CANDIDATE_CAP).unwrap();
                let expected = naive_average_risk(&log, kind, size);
                let worst = naive_worst_risk(&log, kind, size);
                match (expected, worst) {
                    (Some((cd, td)), Some((wcd, wtd))) => {
                        let avg = score::<f64>(&index, Aggregation::Average).unwrap();
                        let w = score::<f64>(&index, Aggregation::Worst).unwrap();
                        assert!((avg.cd - cd).abs() < 1e-9 && (avg.td - td).abs() < 1e-9);
                        assert!((w.cd - wcd).abs() < 1e-9 && (w.td - wtd).abs() < 1e-9);
                    }
                    _ => assert!(index.is_empty()),
                }
            }
        }
    }
}

#[test]
fn small_constructed_instance() {
    // {a}: all four traces, variants 1:1:2
    let log = EventLog::from_traces([
        (vec!["a", "b"], 1),
        (vec!["a", "c"], 1),
        (vec!["a", "c", "c"], 2),
    ])
    .unwrap();
    let index = enumerate(&log, BkType::Set, 1, DEFAULT_CANDIDATE_CAP).unwrap();
    let (cd, td) = naive_average_risk(&log, BkType::Set, 1).unwrap();
    assert_eq!(index.len(), 3);
    assert!((case_disclosure::<f64>(&index, Aggregation::Average).unwrap() - cd).abs() < 1e-12);
    assert!((trace_disclosure::<f64>(&index, Aggregation::Average).unwrap() - td).abs() < 1e-12);
    // {a}: 1.5/2 bits, {b}: singleton, {c}: 0.918.../log2(3)
    let expected_td = 1.0 - (0.75 + 0.0 + (-(1.0 / 3.0f64) * (1.0 / 3.0f64).log2() - (2.0 / 3.0) * (2.0f64 / 3.0).log2()) / 3f64.log2()) / 3.0;
    assert!((td - expected_td).abs() < 1e-12);
}

#[test]
fn empty_index_is_an_error_not_zero() {
    let log = EventLog::from_traces([(vec!["a"], 3)]).unwrap();
    let index = enumerate(&log, BkType::Sequence, 2, DEFAULT_CANDIDATE_CAP).unwrap();
    assert!(index.is_empty());
    assert!(case_disclosure::<f64>(&index, Aggregation::Average).is_err());
    assert!(trace_disclosure::<f64>(&index, Aggregation::Worst).is_err());
}

#[test]
fn profile_covers_grid_and_records_failures() {
    let log = common::example1();
    let p = risk_profile::<f64>(&log, &[BkType::Set], &[1, 2], Aggregation::Average, DEFAULT_CANDIDATE_CAP).unwrap();
    assert_eq!(p.cells.len(), 2);
    assert!(p.get(BkType::Set, 1).is_some() && p.get(BkType::Set, 2).is_some());

    let p = risk_profile::<f64>(&log, &BkType::ALL, &[1, 2, 5], Aggregation::Worst, 5).unwrap();
    assert_eq!(p.cells.len(), 9);
    assert!(matches!(p.cells[&(BkType::Sequence, 2)], RiskCell::ResourceLimit { cap: 5, .. }));
    assert!(matches!(p.cells[&(BkType::Set, 5)], RiskCell::NoCandidates));
    assert!(p.get(BkType::Set, 1).is_some());

    assert!(risk_profile::<f64>(&log, &[BkType::Set], &[], Aggregation::Average, 10).is_err());
    assert!(risk_profile::<f64>(&log, &[BkType::Set], &[0], Aggregation::Average, 10).is_err());
}

#[test]
fn all_unique_worst_case_is_one() {
    let log = EventLog::from_traces([(vec!["a", "b"], 1), (vec!["c"], 1), (vec!["d", "e", "f"], 1)]).unwrap();
    for kind in BkType::ALL {
        let index = enumerate(&log, kind, 1, DEFAULT_CANDIDATE_CAP).unwrap();
        assert_eq!(case_disclosure::<f64>(&index, Aggregation::Worst).unwrap(), 1.0);
    }
}

#[test]
fn single_precision_tracks_double() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let log = random_log(&mut rng, 6, 5, 6, 5);
    let index = enumerate(&log, BkType::Multiset, 2, DEFAULT_CANDIDATE_CAP).unwrap();
    let a = score::<f64>(&index, Aggregation::Average).unwrap();
    let b = score::<f32>(&index, Aggregation::Average).unwrap();
    assert!((a.cd - b.cd as f64).abs() < 1e-5 && (a.td - b.td as f64).abs() < 1e-5);
}

fn small_log() -> impl Strategy<Value = EventLog> {
    prop::collection::vec((prop::collection::vec(0usize..5, 1..7), 1u64..6), 1..7).prop_map(|ts| {
        let labels = ["a", "b", "c", "d", "e"];
        EventLog::from_traces(ts.into_iter().map(|(t, c)| (t.into_iter().map(|i| labels[i]).collect::<Vec<_>>(), c))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scores_are_bounded_and_worst_dominates(log in small_log(), size in 1usize..4) {
        for kind in BkType::ALL {
            let index = enumerate(&log, kind, size, DEFAULT_CANDIDATE_CAP).unwrap();
            if index.is_empty() { continue; }
            let avg = score::<f64>(&index, Aggregation::Average).unwrap();
            let worst = score::<f64>(&index, Aggregation::Worst).unwrap();
            for v in [avg.cd, avg.td, worst.cd, worst.td] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            // a float mean of equal terms may round one ulp above them
            prop_assert!(worst.cd >= avg.cd - 1e-12);
            prop_assert!(worst.td >= avg.td - 1e-12);
        }
    }

    #[test]
    fn copies_of_one_variant(trace in prop::collection::vec(0usize..4, 1..7), n in 1u64..50, size in 1usize..4) {
        let labels = ["a", "b", "c", "d"];
        let log = EventLog::from_traces([(trace.iter().map(|&i| labels[i]).collect::<Vec<_>>(), n)]).unwrap();
        for kind in BkType::ALL {
            let index = enumerate(&log, kind, size, DEFAULT_CANDIDATE_CAP).unwrap();
            if index.is_empty() { continue; }
            for agg in [Aggregation::Average, Aggregation::Worst] {
                let s = score::<f64>(&index, agg).unwrap();
                prop_assert!((s.cd - 1.0 / n as f64).abs() < 1e-12);
                prop_assert_eq!(s.td, 1.0);
            }
        }
    }

    /// Variants over pairwise disjoint alphabets: every projection holds a
    /// single variant.
    #[test]
    fn single_variant_projections_give_full_disclosure(counts in prop::collection::vec(1u64..20, 1..6)) {
        let traces: Vec<(Vec<String>, u64)> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (vec![format!("p{i}"), format!("q{i}"), format!("q{i}")], c))
            .collect();
        let log = EventLog::from_traces(traces).unwrap();
        for kind in BkType::ALL {
            for size in 1..=2 {
                let index = enumerate(&log, kind, size, DEFAULT_CANDIDATE_CAP).unwrap();
                for agg in [Aggregation::Average, Aggregation::Worst] {
                    prop_assert_eq!(trace_disclosure::<f64>(&index, agg).unwrap(), 1.0);
                }
            }
        }
    }

    /// `m` rotations of the same `m` activities, one trace each: every
    /// singleton set matches `m` distinct traces.
    #[test]
    fn uniform_projections_give_zero(m in 2usize..8) {
        let traces: Vec<(Vec<String>, u64)> = (0..m)
            .map(|i| ((0..m).map(|j| format!("y{}", (i + j) % m)).collect(), 1))
            .collect();
        let log = EventLog::from_traces(traces).unwrap();
        let index = enumerate(&log, BkType::Set, 1, DEFAULT_CANDIDATE_CAP).unwrap();
        for agg in [Aggregation::Average, Aggregation::Worst] {
            prop_assert!(trace_disclosure::<f64>(&index, agg).unwrap().abs() < 1e-12);
        }
    }
}
