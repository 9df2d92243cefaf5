use core::fmt;

/// Failures reported by the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Invalid problem or configuration data.
    InvalidInput(&'static str),
    /// The ODE integrator could not make progress.
    Integration { x: f64 },
    /// The collocation design matrix lost rank.
    IllConditioned { rank: usize, needed: usize },
    /// A quadrature did not reach its tolerance.
    Quadrature { estimate: f64, error: f64 },
    /// Real-l kernel requested too close to the diagonal `t = x`.
    NearDiagonal { t: f64, limit: f64 },
    /// A tabulated potential row is unusable.
    BadTableRow { row: usize, reason: &'static str },
    /// A bracketing root search was handed an interval without a sign change.
    NoSignChange { lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Integration { x } => write!(f, "ODE step size underflow at x = {x}"),
            Error::IllConditioned { rank, needed } => write!(
                f,
                "collocation matrix is rank deficient: effective rank {rank}, need {needed}"
            ),
            Error::Quadrature { estimate, error } => write!(
                f,
                "quadrature did not converge (estimate {estimate}, error {error})"
            ),
            Error::NearDiagonal { t, limit } => write!(
                f,
                "t = {t} lies beyond the near-diagonal cutoff {limit}"
            ),
            Error::BadTableRow { row, reason } => {
                write!(f, "potential table row {row}: {reason}")
            }
            Error::NoSignChange { lo, hi } => {
                write!(f, "no sign change on [{lo}, {hi}]")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
