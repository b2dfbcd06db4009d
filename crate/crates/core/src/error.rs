use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("no sign change of the threshold difference in [{lo}, {hi}] kV/cm")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("empty basis: {0}")]
    EmptyBasis(String),
    #[error("incoming channel {0} assigned to class 2")]
    IncomingInClass2(String),
    #[error("Van Vleck denominator {gap_ghz:.4} GHz between {a} and {b} is below the floor")]
    DegenerateDenominator { a: String, b: String, gap_ghz: f64 },
    #[error("non-finite log-derivative at R = {r} a0")]
    NonFinite { r: f64 },
    #[error("step size underflow at R = {r} a0")]
    StepUnderflow { r: f64 },
    #[error("matching failed: {0}")]
    Matching(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
