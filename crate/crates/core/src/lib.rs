//! Privacy quantification for process-mining event logs.
//!
//! Two disclosure-risk measures are computed from the background knowledge
//! an adversary may hold about a case (a set, multiset or subsequence of its
//! activities):
//!
//! * **case disclosure**: how uniquely a case is re-identified,
//! * **trace disclosure**: how certainly its complete trace is revealed.
//!
//! Data utility is measured as one minus the earth mover's distance between
//! the variant distributions of an original and an anonymized log, with the
//! normalized Levenshtein distance as ground cost, solved exactly.
//!
//! The numeric code is generic over the scalar type: risk measures run on
//! any [`Real`] (`f32`, `f64`), the transport solver on any [`Scalar`],
//! including exact rationals ([`Exact`]).
//!
//! ```
//! use pmprivacy::{enumerate, case_disclosure, trace_disclosure, Aggregation, BkType, EventLog};
//!
//! let log = EventLog::from_traces([
//!     (vec!["a", "b", "c", "d"], 4),
//!     (vec!["e", "f"], 4),
//!     (vec!["g", "h"], 4),
//! ])?;
//! let index = enumerate(&log, BkType::Set, 1, 1_000)?;
//! assert_eq!(case_disclosure::<f64>(&index, Aggregation::Average)?, 0.25);
//! assert_eq!(trace_disclosure::<f64>(&index, Aggregation::Average)?, 1.0);
//! # Ok::<(), pmprivacy::Error>(())
//! ```

pub mod anonymizer;
pub mod background;
pub mod distance;
pub mod error;
pub mod event_log;
pub mod ingest;
pub mod risk;
pub mod scalar;
pub mod utility;

pub use anonymizer::{k_anonymize, AnonymizationConfig, Strategy};
pub use background::{
    enumerate, matches, project, BkType, Candidate, CandidateIndex, Projection, ProjectionRef,
    DEFAULT_CANDIDATE_CAP,
};
pub use distance::{levenshtein, normalized_distance};
pub use error::{Error, Result};
pub use event_log::{
    build_log, build_log_with, log_entropy, max_entropy, stats, trace_frequency, Activity,
    ActivityId, ActivityTable, EventLog, LogStats, RawEvent, Variant,
};
pub use risk::{
    case_disclosure, risk_profile, score, trace_disclosure, Aggregation, RiskCell, RiskProfile,
    RiskScore,
};
pub use scalar::{Exact, Real, Scalar};
pub use utility::{
    build_problem, data_utility, solve, utility_of, LogTransport, TransportPlan, TransportProblem,
    UtilityReport,
};

/// Double-precision instantiations.
pub type RiskScoreF64 = RiskScore<f64>;
pub type RiskProfileF64 = RiskProfile<f64>;
pub type LogStatsF64 = LogStats<f64>;
pub type TransportProblemF64 = TransportProblem<f64>;
pub type TransportPlanF64 = TransportPlan<f64>;
pub type UtilityReportF64 = UtilityReport<f64>;

/// Exact rational instantiations of the transport types.
pub type TransportProblemExact = TransportProblem<Exact>;
pub type TransportPlanExact = TransportPlan<Exact>;
pub type UtilityReportExact = UtilityReport<Exact>;
