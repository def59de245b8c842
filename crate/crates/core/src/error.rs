use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the detection library.
///
/// Indices carried by the variants are 1-based, like every index in the
/// public API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input series is empty")]
    EmptyInput,

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("invalid index triple s={s}, b={b}, e={e} for a series of length {len}")]
    IndexOrder {
        s: usize,
        b: usize,
        e: usize,
        len: usize,
    },

    #[error("contrast undefined at b={b} on [{s}, {e}]: b must lie strictly inside the interval")]
    DegenerateSpan { s: usize, b: usize, e: usize },

    #[error("interval [{s}, {e}] is shorter than the minimal span {min_span}")]
    SpanTooShort { s: usize, e: usize, min_span: usize },

    #[error("expansion step {lambda} is invalid for a series of length {len}")]
    BadLambda { lambda: usize, len: usize },

    #[error("block scale {scale} is invalid for a series of length {len}")]
    BadScale { scale: usize, len: usize },

    #[error("noise scale estimate is zero; supply sigma explicitly")]
    ZeroScale,

    #[error("series too short ({len}) to estimate the noise scale")]
    TooShortForScale { len: usize },

    #[error("spline design is rank-deficient for knots {knots:?}")]
    SingularFit { knots: Vec<usize> },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("Student-t degrees of freedom must exceed 2, got {0}")]
    BadDof(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot place {k} change-points in a series of length {len}")]
    Infeasible { k: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("change-points must be sorted, unique and inside [1, {max}]: {points:?}")]
    BadChangePoints { points: Vec<usize>, max: usize },
}
