use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {value} does not fit in {width} bits")]
    ValueTooLarge { value: u64, width: usize },

    #[error("line range {start}+{len} exceeds width {width}")]
    RangeOutOfBounds { start: usize, len: usize, width: usize },

    #[error("line range must cover at least one line")]
    EmptyRange,

    #[error("bus of {0} lines cannot be read as a 64-bit value")]
    BusTooWide(usize),

    #[error("gate {gate} references line {line} outside width {width}")]
    LineOutOfBounds { gate: String, line: usize, width: usize },

    #[error("gate {0} references the same line twice")]
    DuplicateLine(String),

    #[error("register width {register} does not match diagram width {diagram}")]
    WidthMismatch { register: usize, diagram: usize },

    #[error("diagram contains {0}, which cannot be inverted")]
    NotInvertible(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("problem width n={0} must be even and at least 4")]
    InvalidWidth(usize),

    #[error("dividend {value} is outside [2, 2^{n})")]
    InvalidDividend { value: u64, n: usize },

    #[error("divisor {0} is degenerate (must be at least 2)")]
    DegenerateDivisor(u64),

    #[error("bank of 2^{0} registers exceeds the supported size")]
    BankTooLarge(usize),

    #[error("{0} is only defined for {1}")]
    WrongVariant(&'static str, &'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
