use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown permissible exponent for k={k}, s={s}")]
    UnknownExponent { k: u32, s: String },

    #[error("infeasible Hölder system: fixed weights sum to {sum} >= 1")]
    InfeasibleHolder { sum: f64 },

    #[error("Hölder weights missing: system has not been solved")]
    HolderUnsolved,

    #[error("theta/sigma undefined for pair (k={k}, s={s})")]
    ThetaSigmaUndefined { k: u32, s: u32 },

    #[error("range too large; use chunked mode (requested {requested}, budget {budget})")]
    RangeTooLarge { requested: u64, budget: u64 },

    #[error("unfactored input: {0} exceeds the trial-division limit")]
    Unfactored(u64),

    #[error("reduced fraction required: gcd({a}, {q}) != 1")]
    NotReduced { q: u64, a: u64 },

    #[error("no primes in (R/2, R] for R={0}")]
    NoPrimes(u64),

    #[error("kernel defined on major arcs only")]
    MinorArc,

    #[error("dimension beyond desk scale: r={0} > 3")]
    DimensionTooLarge(usize),

    #[error("infeasible size: {0}")]
    Infeasible(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this failure. 0, 1 and 2 are reserved for
    /// success, failed checks and usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } => 3,
            Error::Parse(_) => 4,
            Error::Io(_) => 5,
            Error::RangeTooLarge { .. } => 6,
            Error::Infeasible(_) => 7,
            Error::DimensionTooLarge(_) => 8,
            Error::Unfactored(_) => 9,
            Error::NotReduced { .. } => 10,
            Error::NoPrimes(_) => 11,
            Error::MinorArc => 12,
            Error::UnknownExponent { .. } => 13,
            Error::InfeasibleHolder { .. } => 14,
            Error::HolderUnsolved => 15,
            Error::ThetaSigmaUndefined { .. } => 16,
        }
    }
}
