//! Infinite Euler products with certified tails.
//!
//! Every product is summed as `Σ log(local factor)` with compensation. The
//! factors `C_p(s) = 1 + X(1 − X)/(p(p − 1))`, `X = p^{−s−1}`, are the slow
//! part of `Φ₂`; beyond the cutoff `P` they are replaced by
//! `ζ_{>P}(s+3) ζ_{>P}(s+4) / (ζ_{>P}(2s+4) ζ_{>P}(2s+5))`, which leaves
//! local factors `R_p = 1 + O(p^{−r})` with `r = min(σ + 5, 4σ + 8)`.

use alloc::format;

use num_complex::Complex64;

use super::zeta::complex_zeta;
use crate::math::{prime_divisors, ComplexSum};
use crate::saddle::{log1m, p_pow_neg};
use crate::sieve::{primes_up_to, PrimeTable};
use crate::{Error, Result};

/// Number of primes just below the cutoff used to sample the tail constant.
const TAIL_SAMPLE: usize = 64;
/// Safety factor applied to the sampled tail constant.
const TAIL_SAFETY: f64 = 4.0;
/// Smallest `Re s` for which the accelerated tail converges fast enough.
pub const MIN_RE_S: f64 = -1.5;

/// Prime cutoff and tolerance for the certified tail of infinite products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub p_max: u64,
    /// Largest accepted relative tail bound.
    pub tolerance: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { p_max: 100_000, tolerance: 1e-9 }
    }
}

/// A product value with its relative error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: Complex64,
    /// Bound on `|true/value − 1|` from primes beyond the cutoff.
    pub tail: f64,
    /// Floating-point error estimate for the finite part.
    pub rounding: f64,
}

impl Certified {
    pub fn exact(value: Complex64) -> Self {
        Self { value, tail: 0.0, rounding: 0.0 }
    }

    /// Relative error bound `tail + rounding`.
    pub fn rel_error(&self) -> f64 {
        self.tail + self.rounding
    }

    /// Absolute error bound.
    pub fn abs_error(&self) -> f64 {
        self.rel_error() * self.value.norm()
    }

    pub fn scale(self, z: Complex64) -> Self {
        Self { value: self.value * z, ..self }
    }

    pub fn mul(self, other: Certified) -> Self {
        Self {
            value: self.value * other.value,
            tail: (1.0 + self.tail) * (1.0 + other.tail) - 1.0,
            rounding: self.rounding + other.rounding,
        }
    }
}

/// Log-space accumulator that also tracks a rounding estimate.
#[derive(Debug, Clone, Default)]
pub(crate) struct LogProduct {
    sum: ComplexSum,
    magnitude: f64,
}

impl LogProduct {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, l: Complex64) {
        self.sum.add(l);
        self.magnitude += l.norm();
    }

    pub(crate) fn sub(&mut self, l: Complex64) {
        self.add(-l);
    }

    pub(crate) fn log(&self) -> Complex64 {
        self.sum.value()
    }

    pub(crate) fn rounding(&self) -> f64 {
        // each log is good to a few ulps of its size; exp adds |Σ| ulps
        8.0 * f64::EPSILON * (self.magnitude + self.sum.value().norm() + 1.0)
    }

    pub(crate) fn certified(&self, tail: f64) -> Certified {
        Certified { value: self.log().exp(), tail, rounding: self.rounding() }
    }
}

/// `log E_p(s) = log((1 + X/(p − 1))/(1 − X))`, `X = p^{−s−1}`.
pub fn log_e_p(p: u64, s: Complex64) -> Complex64 {
    let x = p_pow_neg(p, s + 1.0);
    log1m(-x / (p - 1) as f64) - log1m(x)
}

/// `log C_p(s) = log(1 + X(1 − X)/(p(p − 1)))`.
pub fn log_c_p(p: u64, s: Complex64) -> Complex64 {
    let x = p_pow_neg(p, s + 1.0);
    let pf = p as f64;
    log1m(-x * (1.0 - x) / (pf * (pf - 1.0)))
}

/// `log L_p(s₁, s₂) = log(1 + (1 − p^{−s₁})/((1 − 1/p)(p^{s₂+1} − 1)))`.
pub fn log_l_p(p: u64, s1: Complex64, s2: Complex64) -> Complex64 {
    let pf = p as f64;
    let x = p_pow_neg(p, s2 + 1.0);
    // (p^{s₂+1} − 1)^{−1} = X/(1 − X)
    let w = (1.0 - p_pow_neg(p, s1)) * x / ((1.0 - 1.0 / pf) * (1.0 - x));
    log1m(-w)
}

/// Accelerated log of `R_p = C_p(s) (1−p^{−s−3})(1−p^{−s−4}) / ((1−p^{−2s−4})(1−p^{−2s−5}))`.
fn log_r_p(p: u64, s: Complex64) -> Complex64 {
    log_c_p(p, s) + log1m(p_pow_neg(p, s + 3.0)) + log1m(p_pow_neg(p, s + 4.0))
        - log1m(p_pow_neg(p, 2.0 * s + 4.0))
        - log1m(p_pow_neg(p, 2.0 * s + 5.0))
}

/// Evaluator for the infinite products, owning a prime table up to the cutoff.
#[derive(Debug, Clone)]
pub struct EulerProducts {
    truncation: Truncation,
    primes: PrimeTable,
}

impl EulerProducts {
    pub fn new(truncation: Truncation) -> Result<Self> {
        let Truncation { p_max, tolerance } = truncation;
        if p_max < 1000 {
            return Err(Error::InvalidArgument(format!("prime cutoff must be at least 1000, got {p_max}")));
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        Ok(Self { truncation, primes: primes_up_to(p_max) })
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    /// Same products with the cutoff doubled.
    pub fn refined(&self) -> Result<Self> {
        Self::new(Truncation { p_max: 2 * self.truncation.p_max, ..self.truncation })
    }

    fn check_domain(&self, s: Complex64) -> Result<()> {
        if !(s.re > MIN_RE_S) {
            return Err(Error::OutsideDomain(format!(
                "Euler product tail needs Re s > {MIN_RE_S}, got {s}"
            )));
        }
        Ok(())
    }

    /// `log ζ_{>t}(w) = log ζ(w) + Σ_{p ≤ t} log(1 − p^{−w})`.
    fn log_zeta_above(&self, w: Complex64, t: u64, acc: &mut LogProduct, sign: f64) -> Result<()> {
        acc.add(complex_zeta(w)?.ln() * sign);
        for &p in self.primes.up_to(t) {
            acc.add(log1m(p_pow_neg(p, w)) * sign);
        }
        Ok(())
    }

    /// Bound on `|Σ_{p > P} log R_p(s)|` from a constant sampled on the
    /// primes just below `P`.
    pub fn tail_bound(&self, s: Complex64) -> f64 {
        let r = (s.re + 5.0).min(4.0 * s.re + 8.0);
        let ps = self.primes.primes();
        let sample = &ps[ps.len().saturating_sub(TAIL_SAMPLE)..];
        let c = sample
            .iter()
            .map(|&p| log_r_p(p, s).norm() * libm::pow(p as f64, r))
            .fold(0.0, f64::max)
            * TAIL_SAFETY;
        let pm = self.truncation.p_max as f64;
        let t = c * libm::pow(pm, 1.0 - r) / (r - 1.0);
        libm::expm1(t)
    }

    fn certify(&self, acc: &LogProduct, tail: f64) -> Result<Certified> {
        if tail > self.truncation.tolerance {
            return Err(Error::TailTooLarge { bound: tail, tolerance: self.truncation.tolerance });
        }
        Ok(acc.certified(tail))
    }

    fn add_log_c_tail(&self, s: Complex64, y: u64, acc: &mut LogProduct) -> Result<f64> {
        self.check_domain(s)?;
        let pm = self.truncation.p_max;
        if y >= pm {
            return Err(Error::InsufficientPrimes { needed: y + 1, limit: pm });
        }
        for &p in &self.primes.primes()[self.primes.pi(y)..] {
            acc.add(log_c_p(p, s));
        }
        self.log_zeta_above(s + 3.0, pm, acc, 1.0)?;
        self.log_zeta_above(s + 4.0, pm, acc, 1.0)?;
        self.log_zeta_above(2.0 * s + 4.0, pm, acc, -1.0)?;
        self.log_zeta_above(2.0 * s + 5.0, pm, acc, -1.0)?;
        Ok(self.tail_bound(s))
    }

    /// `Π_{p > y} C_p(s)`.
    pub fn c_tail(&self, s: Complex64, y: u64) -> Result<Certified> {
        let mut acc = LogProduct::new();
        let tail = self.add_log_c_tail(s, y, &mut acc)?;
        self.certify(&acc, tail)
    }

    /// `Π_{p > y} E_p(s) = ζ_{>y}(s+1) ζ_{>y}(s+2) Π_{p > y} C_p(s)`.
    pub fn e_tail(&self, s: Complex64, y: u64) -> Result<Certified> {
        let mut acc = LogProduct::new();
        let tail = self.add_log_c_tail(s, y, &mut acc)?;
        self.log_zeta_above(s + 1.0, y, &mut acc, 1.0)?;
        self.log_zeta_above(s + 2.0, y, &mut acc, 1.0)?;
        self.certify(&acc, tail)
    }

    /// `Φ₂(s; a) = Σ_{(n, a) = 1} 1/(φ(n) nˢ)
    ///          = ζ(s+1) ζ(s+2) Π_p C_p(s) Π_{p | a} E_p(s)^{−1}`.
    pub fn phi2(&self, s: Complex64, a: i64) -> Result<Certified> {
        if a == 0 {
            return Err(Error::InvalidArgument("a must be nonzero".into()));
        }
        let mut acc = LogProduct::new();
        let tail = self.add_log_c_tail(s, 1, &mut acc)?;
        acc.add(complex_zeta(s + 1.0)?.ln());
        acc.add(complex_zeta(s + 2.0)?.ln());
        for p in prime_divisors(a.unsigned_abs()) {
            acc.sub(log_e_p(p, s));
        }
        self.certify(&acc, tail)
    }
}
