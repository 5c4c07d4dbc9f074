use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table of {requested} entries exceeds the memory budget of {budget} entries")]
    Capacity { requested: u64, budget: u64 },

    #[error("{value} is outside the table range [1, {limit}]")]
    OutOfRange { value: u64, limit: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight `{0}` is not in the Ewens regime")]
    WrongRegime(String),

    #[error("partition sum S(x) is zero; the measure is degenerate")]
    DegenerateTable,

    #[error("series for {what} does not converge")]
    Divergent { what: String },

    #[error("prime cutoff {cutoff} gives relative error bound {bound:.3e}, above tolerance {tolerance:.3e}")]
    CutoffInsufficient { cutoff: u64, bound: f64, tolerance: f64 },

    #[error("root of {what} could not be bracketed")]
    NonBracketing { what: &'static str },

    #[error("n = 1 has no prime factor")]
    NoPrimeFactor,

    #[error("non-positive remaining mass {0} in residual ratios")]
    NonPositiveRemainder(f64),

    #[error("parts have zero total mass")]
    ZeroMass,

    #[error("n = {n} is too large for exhaustive enumeration (max {max})")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
