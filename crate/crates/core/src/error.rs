use thiserror::Error;

/// Errors raised by the factorial analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("factor count {k} is outside the supported range 1..={max}")]
    FactorCount { k: u32, max: u32 },

    #[error("factor index {index} is outside 1..={k}")]
    FactorIndex { index: u32, k: u32 },

    #[error("expected a vector of length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid treatment level {0:?}")]
    InvalidTreatment(String),

    #[error("duplicate factor set {0} in working model")]
    DuplicateSet(String),

    #[error("non-finite outcome {value} for unit {unit}")]
    NonFiniteOutcome { unit: usize, value: f64 },

    #[error("no units observed in arm(s) {}", .0.join(", "))]
    MissingArms(Vec<String>),

    #[error("arm(s) {} need at least two units for variance estimation", .0.join(", "))]
    InsufficientReplication(Vec<String>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("enumeration would visit {count} assignments (limit {limit})")]
    InstanceTooLarge { count: f64, limit: f64 },

    #[error("probability {0} is outside (0, 1)")]
    Probability(f64),

    #[error("screening level {level}: {source}")]
    AtLevel {
        level: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True when the error stems from missing or under-replicated arms.
    pub fn is_replication(&self) -> bool {
        match self {
            Error::MissingArms(_) | Error::InsufficientReplication(_) => true,
            Error::AtLevel { source, .. } => source.is_replication(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
