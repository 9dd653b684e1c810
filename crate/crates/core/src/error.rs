use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("denominator near zero ({0:.3e})")]
    DenominatorNearZero(f64),

    #[error("denominator vanishes in the bidisk (|den| = {0:.3e})")]
    DenominatorVanishes(f64),

    #[error("not a self-map of the disk: sampled modulus {0:.12}")]
    NotASelfMap(f64),

    #[error("unknown builtin map '{0}'")]
    UnknownBuiltin(String),

    #[error("boundary limit did not settle (error estimate {0:.3e})")]
    NoLimit(f64),

    #[error("boundary point is not fixed: limit {re:.12}{im:+.12}i")]
    NotFixed { re: f64, im: f64 },

    #[error("directional derivative is not real (imaginary residual {0:.3e})")]
    NonRealDerivative(f64),

    #[error("K-curve does not cross 1 on the grid")]
    NoRoot,

    #[error("slice is the identity")]
    IdentitySlice,

    #[error("could not decide the slice behaviour: {0}")]
    Undecided(String),

    #[error("no interior fixed point: {0}")]
    NoInteriorFixedPoint(String),

    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),

    #[error("ambiguous classification: {0}")]
    Ambiguous(String),

    #[error("unclassifiable: {0}")]
    Unclassifiable(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for outcomes that are inconclusive rather than broken.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Ambiguous(_) | Error::Unclassifiable(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
