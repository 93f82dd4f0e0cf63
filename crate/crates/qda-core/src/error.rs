use core::fmt;

/// Where an elimination or solve broke down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Step `k` of the A-side reverse elimination.
    ReduceA(usize),
    /// Step `k` of the B-side forward elimination.
    ReduceB(usize),
    /// Closed-form initialization: the mixed block matrix is singular.
    ClosedForm,
    /// Factorization of W or W̃ (or the SF1/SF2 analogues) in a doubling step.
    Kernel,
    /// Non-finite entries produced by doubling step `i`.
    NonFinite(usize),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::ReduceA(k) => write!(f, "A-elimination step {k}"),
            Stage::ReduceB(k) => write!(f, "B-elimination step {k}"),
            Stage::ClosedForm => write!(f, "closed-form initialization"),
            Stage::Kernel => write!(f, "singular kernel in doubling step"),
            Stage::NonFinite(i) => write!(f, "non-finite iterate at iteration {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is numerically singular at pivot {pivot}")]
    SingularMatrix { pivot: usize },
    #[error("matrix is numerically rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("breakdown: {0}")]
    Breakdown(Stage),
    #[error("pivot ({row}, {col}) is numerically zero")]
    ZeroPivot { row: usize, col: usize },
    #[error("entry magnitude exceeds 1e300")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
