use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: i64, rank: usize },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("empty geodesic segment")]
    EmptySegment,

    #[error("invalid lamp table: {0}")]
    LampTable(String),

    #[error("exact TSP solver cap exceeded: {size} points, cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("brute-force TSP guard exceeded: {size} points, limit {limit}")]
    BruteForceGuard { size: usize, limit: usize },

    #[error("tree TSP solver called on a base group whose Cayley graph is not a tree")]
    NotATree,

    #[error("ball size guard exceeded: more than {limit} elements")]
    BallTooLarge { limit: usize },

    #[error("invalid step distribution: {0}")]
    Distribution(String),

    #[error("invalid checkpoint {index} for horizon {horizon}")]
    Checkpoint { index: u64, horizon: u64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("moment accumulator overflow at power {power}")]
    MomentOverflow { power: u32 },

    #[error("point {0} lies outside the D-neighborhood of the geodesic")]
    OutsideNeighborhood(String),

    #[error("L3 violates L1 \u{25b3} L2 \u{2286} L3 \u{2286} L1 \u{222a} L2")]
    SandwichPrecondition,

    #[error("lemma hypotheses not certified: {0}")]
    NotCertified(String),

    #[error("invalid node path: {0}")]
    InvalidPath(String),

    #[error("invalid config `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors raised by a size or memory guard rather than by bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. }
                | Error::BruteForceGuard { .. }
                | Error::BallTooLarge { .. }
                | Error::MomentOverflow { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
