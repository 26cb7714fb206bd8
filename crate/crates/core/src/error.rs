use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// A quadrature rule failed its acceptance test at the maximum resolution.
    Precision { region: String, change: f64 },
    /// An integrand was not finite at a node.
    Evaluation { re: f64, im: f64 },
    /// A matrix was numerically singular or indefinite.
    Degenerate { detail: String },
    /// An iterative method did not converge.
    NoConvergence { detail: String },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Precision { region, change } => write!(
                f,
                "quadrature on {region} not accepted: doubling the resolution changed the area by {change:e}"
            ),
            Error::Evaluation { re, im } => {
                write!(f, "integrand is not finite at node ({re}, {im})")
            }
            Error::Degenerate { detail } => write!(f, "numerically degenerate: {detail}"),
            Error::NoConvergence { detail } => write!(f, "no convergence: {detail}"),
        }
    }
}

impl core::error::Error for Error {}
