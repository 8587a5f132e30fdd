use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engine can report. Variants map one-to-one onto the
/// error codes surfaced by the command line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("group closure exceeded the order bound {0}")]
    OrderBoundExceeded(usize),
    #[error("p = {p} divides |E| = {order}")]
    PDividesE { p: u64, order: usize },
    #[error("action invalid: {0}")]
    ActionInvalid(String),
    #[error("C_E(D) is not central in E")]
    ZNotCentral,
    #[error("C_E(D) is not cyclic")]
    ZNotCyclic,
    #[error("phi is not faithful on Z (exponent {exponent} modulo |Z| = {order})")]
    PhiNotFaithful { exponent: u64, order: usize },
    #[error("D is not the internal direct product [D,E] x C_D(E): {0}")]
    DecompositionFailed(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("character table orthogonality failure: {0}")]
    OrthogonalityFailure(String),
    #[error("no suitable Dixon prime below {0}")]
    NoDixonPrime(u64),
    #[error("dimension check failed: {0}")]
    DimensionCheck(String),
    #[error("idempotent did not split to a free summand: {0}")]
    IdempotentNotSplit(String),
    #[error("conductor {needed} is not supported by a ring of conductor {available}")]
    ConductorMismatch { needed: u64, available: u64 },
    #[error("precision unstable: {0}")]
    PrecisionUnstable(String),
    #[error("cochain dimension {needed} exceeds the size guard {limit}")]
    SizeGuard { needed: usize, limit: usize },
    #[error("closed form {closed} disagrees with oracle {oracle}")]
    CrossCheckMismatch { closed: String, oracle: String },
    #[error("{count} candidate sets exceed the enumeration bound {bound}")]
    EnumerationBoundExceeded { count: u128, bound: u128 },
    #[error("degree {0} is out of range")]
    DegreeOutOfRange(u32),
    #[error("missing data for degree {0}")]
    MissingDegree(usize),
}

impl Error {
    /// Resource bounds are reported separately from input errors by the CLI.
    pub fn is_resource_bound(&self) -> bool {
        matches!(
            self,
            Error::OrderBoundExceeded(_)
                | Error::SizeGuard { .. }
                | Error::EnumerationBoundExceeded { .. }
        )
    }
}
