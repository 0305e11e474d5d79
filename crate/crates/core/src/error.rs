use thiserror::Error;

/// Errors raised by tensor construction, region evaluation and the oracle.
///
/// Indices carried in error values are 0-based; the CLI layer converts them
/// when printing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tensor order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("tensor dimension must be at least 1, got {0}")]
    InvalidDim(usize),

    #[error("index tuple {idx:?} is invalid for order {order}, dimension {dim}")]
    IndexOutOfRange {
        idx: Vec<usize>,
        order: usize,
        dim: usize,
    },

    #[error("duplicate index tuple {0:?}")]
    DuplicateTuple(Vec<usize>),

    #[error("unsorted representative {0:?}")]
    UnsortedRepresentative(Vec<usize>),

    #[error("representative {0:?} conflicts with an earlier permutation")]
    ConflictingPermutation(Vec<usize>),

    #[error("row index {i} and column index {j} must differ")]
    SameIndex { i: usize, j: usize },

    #[error("dimension {0} is too small, at least 2 is required")]
    DimensionTooSmall(usize),

    #[error("invalid subset: {0}")]
    InvalidPartition(String),

    #[error("vector length {got} does not match tensor dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("denominator d must be positive, got {0}")]
    NonPositiveDenominator(f64),

    #[error("dimension {dim} exceeds the subset search cap {cap}")]
    DimensionAboveCap { dim: usize, cap: usize },

    #[error("tensor is not symmetric")]
    NotSymmetric,

    #[error("tensor order {0} is odd")]
    OddOrder(usize),

    #[error("tensor has entries with nonzero imaginary part")]
    ComplexEntries,

    #[error("no start produced a finite iterate")]
    NoConvergence,

    #[error("invalid raster resolution {cols}x{rows}")]
    InvalidResolution { cols: usize, rows: usize },

    #[error("window has zero extent along an axis sampled by more than one cell")]
    DegenerateWindow,
}

pub type Result<T> = std::result::Result<T, Error>;
