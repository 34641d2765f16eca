use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad class of an [`Error`]; front ends map these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input does not describe a legal matrix.
    Validation,
    /// The input is legal but a numerical step could not be completed.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("condition bd_0 > 0 violated: bd_0 = {value}")]
    NonPositiveB0d { value: f64 },
    #[error("rate {which}_{index} = {value} must be a finite non-negative number")]
    NegativeRate { which: &'static str, index: usize, value: f64 },
    #[error("condition bw_{index} > 0 violated: row {index} has zero total rate")]
    ZeroRowWeight { index: usize },
    #[error("final row {index} must have zero row sum, but bu_{index} = {up}")]
    BadFinalRow { index: usize, up: f64 },
    #[error("index ({i}, {j}) outside a matrix with {size} rows")]
    OutOfRange { i: usize, j: usize, size: usize },
    #[error("operation requires a finite matrix")]
    InfiniteExtent,
    #[error("matrix has no rows")]
    Empty,
    #[error("rate arrays have mismatched lengths ({down}, {up}, {tozero})")]
    LengthMismatch { down: usize, up: usize, tozero: usize },
    #[error("generator row 0 must sum to zero, but bd_0 = {value}")]
    NotAGenerator { value: f64 },
    #[error("matrix does not have the absorbing birth-and-death shape: {reason}")]
    ShapeMismatch { reason: &'static str },
    #[error("homogeneous closed forms need bd > 0 and bu > 0; use the general inverse")]
    DegenerateRates,
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: &'static str },

    #[error("zero denominator in {what} at index {index}")]
    ZeroDenominator { what: &'static str, index: usize },
    #[error("adaptive truncation did not settle by level {level} (last change {change:e})")]
    NoConvergence { level: usize, change: f64 },
    #[error("entry ({row}, {col}) is undetermined by the shift procedure")]
    ShiftUnresolvable { row: usize, col: usize },
    #[error("discriminant bw^2 - 4 bu bd is zero")]
    ZeroDiscriminant,
    #[error("off-diagonal product w(i,i+1) w(i+1,i) is not positive at i = {index}")]
    BandProductNonpositive { index: usize },
    #[error("inverse iteration stalled for eigenvalue {index} (residual {residual:e})")]
    IterationStall { index: usize, residual: f64 },
    #[error("eigenvector expansion of the first column is ill conditioned (residual {residual:e})")]
    IllConditionedBasis { residual: f64 },
    #[error("alpha is resonant at stage {stage} with eigenvalue {other}")]
    ResonantAlpha { stage: usize, other: usize },
    #[error("no root of the stage {stage} scalar equation was found")]
    NoRootFound { stage: usize },
    #[error("matrix is singular to working precision (pivot {pivot} at column {col})")]
    SingularMatrix { col: usize, pivot: f64 },
    #[error("rank-one correction scalar a = 1 + dW^-1u vanishes")]
    ZeroScalarA,
    #[error("shifted QR iteration did not converge")]
    NoConvergenceQr,
    #[error("stationary vector cannot be normalised (row-0 sum {sum:e})")]
    NotNormalizable { sum: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NonPositiveB0d { .. }
            | NegativeRate { .. }
            | ZeroRowWeight { .. }
            | BadFinalRow { .. }
            | OutOfRange { .. }
            | InfiniteExtent
            | Empty
            | LengthMismatch { .. }
            | NotAGenerator { .. }
            | ShapeMismatch { .. }
            | DegenerateRates
            | InvalidArgument { .. } => ErrorKind::Validation,
            _ => ErrorKind::Numerical,
        }
    }
}
