use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Population reached the outer sites of the momentum ladder.
    #[error(
        "ladder truncation: edge population {edge_population:.3e} exceeds {limit:.0e} \
         on a ladder of half-width {half_width}; use a wider ladder"
    )]
    Truncation {
        edge_population: f64,
        limit: f64,
        half_width: usize,
    },

    #[error("singular first-order coefficient at q = {q}: J_q({argument}) = {value:e}")]
    SingularCoefficient { q: i64, argument: f64, value: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("grid resolution inadequate: {0}")]
    GridResolution(String),

    #[error("peak not bracketed: {0}")]
    PeakNotBracketed(String),

    #[error("ambiguous multimodal peak: {0}")]
    Multimodal(String),

    #[error("no interior minimum: {0}")]
    NoInteriorMinimum(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
