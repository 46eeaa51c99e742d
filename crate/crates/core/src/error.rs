use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("off-diagonal coefficient a_{index} vanishes")]
    ZeroOffDiagonal { index: i64 },

    #[error("index {index} is outside the explicit table of length {len}")]
    IndexOutOfTable { index: i64, len: usize },

    #[error("explicit table needs `a_minus1` to evaluate a_{{-1}}")]
    MissingBoundary,

    #[error("blend slot {slot} outside 0..={max}")]
    SlotOutOfRange { slot: usize, max: usize },

    #[error("offset {offset} outside {min}..={max}")]
    OffsetOutOfRange { offset: usize, min: usize, max: usize },

    #[error("empty scan range")]
    EmptyRange,

    #[error("initial condition (u_0, u_1) is zero")]
    DegenerateInitial,

    #[error("root of the characteristic polynomial on or near the contour")]
    RootOnBoundary,

    #[error("imaginary residue {residue:e} exceeds tolerance for a real quantity of scale {scale:e}")]
    ImaginaryResidue { residue: f64, scale: f64 },

    #[error("model has no limit transfer matrix family")]
    NoLimitFamily,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
