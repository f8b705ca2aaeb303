use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the operation's domain.
    InvalidArgument(String),
    /// A point lies outside the region where an approximation is claimed to hold.
    OutsideDomain(String),
    /// The prime table does not reach far enough to resolve the request.
    InsufficientPrimes { needed: u64, limit: u64 },
    /// The requested structure would exceed the configured memory budget.
    MemoryBudget { required: u64, budget: u64 },
    /// A counting query asked for something the index does not cover.
    IndexMismatch(String),
    /// An iterative solver did not converge.
    NoConvergence { what: &'static str, iterations: usize },
    /// A truncated Euler product could not be certified at the requested tolerance.
    TailTooLarge { bound: f64, tolerance: f64 },
    /// A quadrature failed its self-check; `diagnostics` holds a node dump.
    Quadrature { what: &'static str, estimate: f64, diagnostics: String },
    /// Evaluation at a pole.
    Pole(String),
    /// A numerical bound that should hold up to the configured constant failed.
    BoundViolation(String),
}

impl Error {
    /// True for failures of numerical routines (as opposed to bad input or resource limits).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::TailTooLarge { .. }
                | Error::Quadrature { .. }
                | Error::BoundViolation(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::OutsideDomain(m) => write!(f, "outside domain: {m}"),
            Error::InsufficientPrimes { needed, limit } => write!(
                f,
                "prime table up to {limit} is insufficient, primes up to {needed} are needed"
            ),
            Error::MemoryBudget { required, budget } => write!(
                f,
                "memory budget exceeded: {required} bytes required, budget is {budget} bytes"
            ),
            Error::IndexMismatch(m) => write!(f, "smooth index mismatch: {m}"),
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::TailTooLarge { bound, tolerance } => write!(
                f,
                "Euler product tail bound {bound:e} exceeds tolerance {tolerance:e}; raise the prime cutoff"
            ),
            Error::Quadrature { what, estimate, .. } => {
                write!(f, "quadrature for {what} failed its self-check (error estimate {estimate:e})")
            }
            Error::Pole(m) => write!(f, "pole: {m}"),
            Error::BoundViolation(m) => write!(f, "bound violated: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
