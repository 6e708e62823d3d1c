use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({lo}, {hi}]: need 0 <= lo < hi <= 1")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("point {0} lies outside [0, 1]")]
    PointOutOfRange(f64),

    #[error("finite point {index} outside domain 1..={domain_size}")]
    IndexOutOfRange { index: u32, domain_size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("partition precondition violated: {0}")]
    PartitionPrecondition(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("sample of size {len} cannot be split into {pieces} equal pieces")]
    IndivisibleSample { len: usize, pieces: usize },

    #[error("sample is inconsistent with every hypothesis in the class: {0}")]
    NoConsistentHypothesis(String),

    #[error("conditioning region has zero mass")]
    ZeroMassRegion,

    #[error("empty data")]
    EmptyData,

    #[error("no candidate constant passes certification: {0}")]
    NoCandidatePasses(String),

    #[error("trial failed at n = {n}, trial {trial}: {source}")]
    Trial {
        n: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
