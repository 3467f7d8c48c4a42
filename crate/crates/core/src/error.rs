use core::fmt;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain(&'static str),
    /// The result does not fit in an `f64`.
    Overflow(&'static str),
    /// A series did not reach its truncation tolerance within the term cap.
    Convergence {
        what: &'static str,
        terms: usize,
        last_term: f64,
    },
    /// A power-type series whose term ratio tends to `ratio >= 1` cannot converge.
    Divergent { what: &'static str, ratio: f64 },
    /// Interpolation between iterated operator levels is too coarse.
    Resolution { estimate: f64, tol: f64 },
    /// A closed-form derivative was requested for an unregistered function.
    DerivativeUnavailable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Overflow(msg) => write!(f, "overflow: {msg}"),
            Error::Convergence {
                what,
                terms,
                last_term,
            } => write!(
                f,
                "{what} did not converge within {terms} terms (last term magnitude {last_term:e})"
            ),
            Error::Divergent { what, ratio } => {
                write!(f, "{what} diverges: term ratio tends to {ratio} (must be < 1)")
            }
            Error::Resolution { estimate, tol } => write!(
                f,
                "interpolation error estimate {estimate:e} exceeds tolerance {tol:e}; increase the grid density"
            ),
            Error::DerivativeUnavailable(msg) => write!(f, "derivative unavailable: {msg}"),
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg))
    }
}
