use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("arithmetic overflow: value does not fit below 2^127")]
    Overflow,

    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: u128, modulus: u128 },

    #[error("pattern has no forms")]
    EmptyPattern,

    #[error("form {index}: leading coefficient must be positive")]
    NonPositiveMultiplier { index: usize },

    #[error("form {index}: gcd(a, b) = {divisor} is a fixed divisor of every value")]
    FixedDivisor { index: usize, divisor: u128 },

    #[error("form {index} duplicates form {first}")]
    DuplicateForm { index: usize, first: usize },

    #[error("pattern is not admissible: every residue modulo {prime} hits some form")]
    Inadmissible { prime: u64 },

    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("wheel limit {limit} admits no wheel prime")]
    NoWheelPrime { limit: u128 },

    #[error("sieve bound {bound} is below 2")]
    SieveBound { bound: u128 },

    #[error(
        "pseudosquare table too small: need L_p > {needed}; load a larger table or raise the trial bound"
    )]
    PseudosquareCapacity { needed: u128 },

    #[error("precondition violated: {0}")]
    Contract(String),

    #[error("checkpoint belongs to a different configuration (expected digest {expected}, found {found})")]
    CheckpointMismatch { expected: String, found: String },

    #[error("corrupt checkpoint at line {line}: {reason}")]
    CheckpointCorrupt { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            reason: reason.into(),
        }
    }
}
