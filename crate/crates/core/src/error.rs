use thiserror::Error;

use crate::background::BkType;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad column mapping, bad flag combination and similar caller mistakes.
    #[error("configuration error: {0}")]
    Config(String),

    /// Unreadable, empty or malformed input.
    #[error("input error: {0}")]
    Input(String),

    /// A value outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no candidates at this size ({bk_type} background knowledge, l = {size})")]
    NoCandidates { bk_type: BkType, size: usize },

    #[error(
        "candidate limit exceeded for {bk_type} background knowledge of size {size}: \
         reached {reached} candidates (cap {cap})"
    )]
    ResourceLimit {
        bk_type: BkType,
        size: usize,
        reached: usize,
        cap: usize,
    },

    /// Transport problem whose masses do not balance or are otherwise invalid.
    #[error("unbalanced transport problem: {0}")]
    Unbalanced(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("k = {k} too large for this log: no variant occurs at least k times")]
    KTooLarge { k: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
