use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violated its documented range.
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("the zero vector has no causal class")]
    ZeroVector,

    /// The affine map sends some point of the Bloch sphere outside the ball.
    #[error("map is not positive: max |t + Λm| = {max_norm:.17e} exceeds 1")]
    NotPositiveMap { max_norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// No value of `w` makes `Q_w` positive semidefinite. Not expected for a
    /// positive map; reported instead of being patched over.
    #[error("no positive semidefinite window for Q_w: {0}")]
    NoPsdWindow(String),

    /// More than one endpoint of the PSD window carries a non-time-like kernel.
    #[error("w0 is not unique: both {w1} and {w2} qualify")]
    AmbiguousW0 { w1: f64, w2: f64 },

    #[error("state has rank {rank}, at most 2 is supported")]
    RankTooHigh { rank: usize },

    #[error("invalid dimensions: {0}")]
    Dimensions(String),

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
}
