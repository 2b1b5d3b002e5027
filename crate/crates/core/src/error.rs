use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),
    #[error("Fourier coefficients are not Hermitian at G = ({g1}, {g2}): V(-G) != conj V(G)")]
    NonHermitianCoefficients { g1: i64, g2: i64 },
    #[error("invalid angle (p, q) = ({p}, {q}): {reason}")]
    InvalidAngle { p: i64, q: i64, reason: String },
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("insufficient n_bands: computed bands top out at {top}, window reaches {requested}")]
    InsufficientBands { top: f64, requested: f64 },
    #[error("energy {energy} is not in a spectral gap")]
    NotInGap { energy: f64 },
    #[error("grid violation: {0}")]
    Grid(String),
    #[error("singular matrix encountered during factorization at pivot {0}")]
    Singular(usize),
    #[error("eigensolver did not converge ({context})")]
    NotConverged { context: String },
    #[error("branch ambiguity at t = {t}: no consistent eigenvector matching at the minimum step")]
    BranchAmbiguity { t: f64 },
    #[error("reference energy {energy} is within {margin} of a gap edge of ({a}, {b})")]
    EnergyTooCloseToEdge { energy: f64, margin: f64, a: f64, b: f64 },
    #[error("decay fit failed: {0}")]
    Decay(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
