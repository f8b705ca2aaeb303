//! The averaged error `σ(x, y, M; a) = Σ_{q ≤ x/M} E*(x, y; a, q)`, its
//! split pieces, the contour integral `I(x, y; M)` and comparison reports.
//!
//! All sums are exact rationals. Real cut points are compared through
//! `⌊·⌋` and integer multiplication so that both sides of every identity
//! see the same set of moduli.

use alloc::format;


use crate::{Error, Result};

mod contour;
mod factor;
mod report;
mod sigma;

pub use contour::{contour_i, ContourIntegral, DOUBLING_TOLERANCE, IMAG_TOLERANCE};
pub use report::{main_term, main_term_psi, u_a, verify_theorem, SigmaReport, SigmaRow};
pub use sigma::{
    diffsigma, remark3_aggregate, sigma1_tilde, sigma2_interchange, sigma_brute, sigma_split, DiffSigma, DivisorAggregate,
    Sigma1Tilde, SigmaSplit,
};

/// Default `ε` for the hypothesis `|a| ≤ M^{1/2−ε}` and the height `L_ε(M)`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Parameters of `σ(x, y, M; a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaQuery {
    pub x: f64,
    pub y: u64,
    pub m: f64,
    pub a: i64,
    pub epsilon: f64,
    /// `0` picks the default pool size.
    pub threads: usize,
}

impl SigmaQuery {
    pub fn new(x: f64, y: u64, m: f64, a: i64) -> Self {
        SigmaQuery { x, y, m, a, epsilon: DEFAULT_EPSILON, threads: 0 }
    }

    pub fn with_threads(self, threads: usize) -> Self {
        SigmaQuery { threads, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        SigmaQuery { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.x >= 1.0) {
            return Err(Error::InvalidArgument(format!("x must be finite and >= 1, got {}", self.x)));
        }
        if !(self.m.is_finite() && self.m >= 1.0) {
            return Err(Error::InvalidArgument(format!("M must be finite and >= 1, got {}", self.m)));
        }
        if self.a == 0 {
            return Err(Error::InvalidArgument("a must be nonzero".into()));
        }
        if self.y < 2 {
            return Err(Error::InvalidArgument(format!("y must be >= 2, got {}", self.y)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// `|a| ≤ M^{1/2−ε}`.
    pub fn in_hypothesis(&self) -> bool {
        self.a.unsigned_abs() as f64 <= libm::pow(self.m, 0.5 - self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SigmaQuery::new(100.0, 5, 10.0, 1).validate().is_ok());
        assert!(SigmaQuery::new(0.5, 5, 10.0, 1).validate().is_err());
        assert!(SigmaQuery::new(100.0, 1, 10.0, 1).validate().is_err());
        assert!(SigmaQuery::new(100.0, 5, 0.9, 1).validate().is_err());
        assert!(SigmaQuery::new(100.0, 5, 10.0, 0).validate().is_err());
        assert!(SigmaQuery::new(f64::NAN, 5, 10.0, 1).validate().is_err());
        assert!(SigmaQuery::new(100.0, 5, 10.0, 1).with_epsilon(0.5).validate().is_err());
    }

    #[test]
    fn hypothesis_flag() {
        // 100^{0.4} ≈ 6.31
        assert!(SigmaQuery::new(1e6, 100, 100.0, 6).in_hypothesis());
        assert!(SigmaQuery::new(1e6, 100, 100.0, -6).in_hypothesis());
        assert!(!SigmaQuery::new(1e6, 100, 100.0, 7).in_hypothesis());
    }
}
