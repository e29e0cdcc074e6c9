use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),

    #[error("partition error: {0}")]
    Partition(String),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not unitary (max-entry defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("conditioning error: {0}")]
    Conditioning(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} = {value} is out of range (expected < {bound})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Bob cannot form his index sets; the run ends without output.
    #[error("protocol aborted: {0}")]
    Aborted(String),

    #[error("cannot decode an aborted transcript")]
    AbortedTranscript,

    /// Alice's reduced states differ between the two choices, so no
    /// receiver-side rotation can exist.
    #[error("attack inapplicable: Alice's view differs between choices by {deviation:e}")]
    AttackInapplicable { deviation: f64 },

    #[error("attack construction failed: residual {residual:e}")]
    Construction { residual: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
