use core::fmt;

/// Errors produced by the numerical kernel and the fitting layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    Domain(&'static str),
    /// An iterative scheme hit its iteration cap before converging.
    NoConvergence {
        what: &'static str,
        iterations: u32,
    },
    /// A bracket for root finding could not be established.
    BracketFailure(&'static str),
    /// Intermediate terms became non-finite.
    Overflow(&'static str),
    /// A tail integral failed its convergence check.
    DivergentIntegral(&'static str),
    /// The sample admits no meaningful estimate (e.g. zero variance).
    Degenerate(&'static str),
    /// An operation that requires data received none.
    EmptySample,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge within {iterations} iterations")
            }
            Error::BracketFailure(what) => write!(f, "failed to bracket root: {what}"),
            Error::Overflow(what) => write!(f, "numerical overflow: {what}"),
            Error::DivergentIntegral(what) => write!(f, "divergent integral: {what}"),
            Error::Degenerate(what) => write!(f, "degenerate sample: {what}"),
            Error::EmptySample => write!(f, "empty sample"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
