use thiserror::Error;

use crate::thompson::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid PL map: {0}")]
    InvalidMap(String),
    #[error("value {0} is not in Z[1/{1}]")]
    NotNAdic(String, u32),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} and {1} are not coprime")]
    NotCoprime(String, String),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("map is not monotone")]
    NotMonotone,
    #[error("map is not strictly decreasing")]
    NotDecreasing,
    #[error("map does not fix {0}")]
    NotFixed(String),
    #[error("anchor mismatch: expected {expected}, found {found}")]
    AnchorMismatch { expected: String, found: String },
    #[error("slope {0} is not an integral power of {1}")]
    SlopeNotPowerOfN(String, u32),
    #[error("not a member of F_{{{n},inf}}: {}", summarize(.violations))]
    NotMember { n: u32, violations: Vec<Violation> },
    #[error("factorization bound of {0} leaves exhausted")]
    SearchExhausted(usize),
    #[error("phi_n mismatch at pair index {0}")]
    PhiMismatch(usize),
    #[error("interpolation points are not strictly increasing")]
    NotSorted,
    #[error("divisibility hypothesis fails: {0}")]
    HypothesisFail(String),
    #[error("bad denominator: {0}")]
    BadDenominator(String),
    #[error("not a decreasing PL involution")]
    NotInvolution,
    #[error("map does not commute with the involution")]
    NotCentralizing,
    #[error("map is not in F_{{n,inf}} x| <h>")]
    NotInGroup,
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("conjugacy not certified: {0}")]
    NotCertified(String),
    #[error("element is not of order two")]
    NotOrderTwo,
    #[error("fixed point {0} is not in (1/k)Z[1/n]")]
    FixedPointNotLattice(String),
    #[error("base map fails the flip-inverse condition")]
    BaseCheckFailed,
    #[error("internal check failed: {0}")]
    Internal(String),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
