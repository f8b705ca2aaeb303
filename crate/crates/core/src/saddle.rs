//! The saddle point `α(x, y)` and the partial Euler product `ζ(s, y)`.

use alloc::format;

use num_complex::Complex64;

use crate::dickman::xi;
use crate::math::{CompensatedSum, ComplexSum};
use crate::sieve::PrimeTable;
use crate::{Error, Result};

const MAX_ITER: usize = 200;

/// `log(1 − w)`, accurate for small `|w|`.
pub(crate) fn log1m(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // −(w + w²/2 + … + w⁶/6); next term is below 1e-21 relative
        let mut p = w;
        let mut s = ComplexSum::new();
        for k in 1..=6 {
            s.add(p / k as f64);
            p *= w;
        }
        -s.value()
    } else {
        (Complex64::new(1.0, 0.0) - w).ln()
    }
}

/// `p^{−s}`.
pub(crate) fn p_pow_neg(p: u64, s: Complex64) -> Complex64 {
    (-s * libm::log(p as f64)).exp()
}

/// `log ζ(s, y) = −Σ_{p ≤ y} log(1 − p^{−s})`.
pub fn log_zeta_y(s: Complex64, y: u64, primes: &PrimeTable) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::InvalidArgument(format!("zeta(s, y) needs Re s > 0, got {s}")));
    }
    primes.require(y)?;
    let mut acc = ComplexSum::new();
    for &p in primes.up_to(y) {
        acc.add(-log1m(p_pow_neg(p, s)));
    }
    Ok(acc.value())
}

/// `ζ(s, y) = Π_{p ≤ y} (1 − p^{−s})^{−1}`, summed in log space.
pub fn zeta_y(s: Complex64, y: u64, primes: &PrimeTable) -> Result<Complex64> {
    Ok(log_zeta_y(s, y, primes)?.exp())
}

/// Real-axis `log ζ(σ, y)`.
pub fn log_zeta_y_real(sigma: f64, y: u64, primes: &PrimeTable) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!("zeta(s, y) needs Re s > 0, got {sigma}")));
    }
    primes.require(y)?;
    let mut acc = CompensatedSum::new();
    for &p in primes.up_to(y) {
        acc.add(-libm::log1p(-libm::exp(-sigma * libm::log(p as f64))));
    }
    Ok(acc.value())
}

/// Saddle-point data for one `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub x: f64,
    pub y: u64,
    pub u: f64,
    pub alpha: f64,
    pub log_zeta_alpha_y: f64,
    pub zeta_alpha_y: f64,
    /// `Σ log p/(p^α − 1)`, equal to `log x` at the solution.
    pub sigma1: f64,
    /// `Σ (log p)² p^α/(p^α − 1)²`.
    pub sigma2: f64,
    pub xi_u: f64,
}

/// `(σ₁(α), σ₂(α))` over `p ≤ y`.
fn sigmas(alpha: f64, ps: &[u64]) -> (f64, f64) {
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for &p in ps {
        let l = libm::log(p as f64);
        let d = libm::expm1(alpha * l);
        s1.add(l / d);
        s2.add(l * l * (d + 1.0) / (d * d));
    }
    (s1.value(), s2.value())
}

/// Solves `Σ_{p ≤ y} log p/(p^α − 1) = log x` by Newton's method inside a
/// shrinking bisection bracket.
pub fn solve_alpha(x: f64, y: u64, primes: &PrimeTable) -> Result<SaddleData> {
    if !(y >= 2 && x >= y as f64) {
        return Err(Error::InvalidArgument(format!("saddle point needs x >= y >= 2, got x = {x}, y = {y}")));
    }
    primes.require(y)?;
    let ps = primes.up_to(y);
    let lx = libm::log(x);
    let ly = libm::log(y as f64);
    let u = lx / ly;
    let xi_u = xi(u);
    let f = |a: f64| {
        let (s1, s2) = sigmas(a, ps);
        (s1 - lx, s2)
    };
    let mut alpha = (1.0 - xi_u / ly).clamp(0.05, 1.2);
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (g, s2) = f(alpha);
        if g > 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        if g.abs() <= 1e-14 * lx {
            converged = true;
            break;
        }
        let newton = alpha + g / s2;
        let next = if newton > lo && newton < hi {
            newton
        } else if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            alpha + 1.0
        };
        if (next - alpha).abs() <= 4.0 * f64::EPSILON * alpha {
            alpha = next;
            converged = true;
            break;
        }
        alpha = next;
    }
    if !converged {
        return Err(Error::NoConvergence { what: "saddle point", iterations: MAX_ITER });
    }
    let (sigma1, sigma2) = sigmas(alpha, ps);
    let log_zeta_alpha_y = log_zeta_y_real(alpha, y, primes)?;
    Ok(SaddleData {
        x,
        y,
        u,
        alpha,
        log_zeta_alpha_y,
        zeta_alpha_y: libm::exp(log_zeta_alpha_y),
        sigma1,
        sigma2,
        xi_u,
    })
}

impl SaddleData {
    /// `log(x^α ζ(α, y))`.
    pub fn log_rankin(&self) -> f64 {
        self.alpha * libm::log(self.x) + self.log_zeta_alpha_y
    }

    /// Rankin's bound `x^α ζ(α, y) ≥ Ψ(x, y)`.
    pub fn rankin_bound(&self) -> f64 {
        libm::exp(self.log_rankin())
    }
}

/// Hildebrand–Tenenbaum main term `x^α ζ(α, y) / (α √(2π σ₂))`.
pub fn ht_estimate(sd: &SaddleData) -> f64 {
    let denom = sd.alpha * libm::sqrt(2.0 * core::f64::consts::PI * sd.sigma2);
    libm::exp(sd.log_rankin() - libm::log(denom))
}

/// `α − (1 − ξ(u)/log y)`.
pub fn alpha_vs_xi(sd: &SaddleData) -> f64 {
    sd.alpha - (1.0 - sd.xi_u / libm::log(sd.y as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::primes_up_to;

    #[test]
    fn single_prime_closed_form() {
        let t = primes_up_to(10);
        for x in [2.0, 10.0, 1e6] {
            let sd = solve_alpha(x, 2, &t).unwrap();
            let want = libm::log(1.0 + libm::log(2.0) / libm::log(x)) / libm::log(2.0);
            assert!((sd.alpha - want).abs() < 1e-14, "x={x}");
        }
        let z = zeta_y(Complex64::new(2.0, 1.0), 2, &t).unwrap();
        let want = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - p_pow_neg(2, Complex64::new(2.0, 1.0)));
        assert!((z - want).norm() < 1e-15);
    }

    #[test]
    fn bisection_oracle() {
        let t = primes_up_to(100);
        let sd = solve_alpha(1e6, 100, &t).unwrap();
        let (mut lo, mut hi) = (1e-6, 2.0);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            let s: f64 = t.up_to(100).iter().map(|&p| libm::log(p as f64) / (libm::pow(p as f64, mid) - 1.0)).sum();
            if s > libm::log(1e6) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((sd.alpha - lo).abs() < 1e-10, "{} vs {lo}", sd.alpha);
        assert!((sd.sigma1 - libm::log(1e6)).abs() < 1e-10 * libm::log(1e6));
    }

    #[test]
    fn x_equals_y() {
        let t = primes_up_to(1000);
        let sd = solve_alpha(1000.0, 1000, &t).unwrap();
        assert!((sd.alpha - 1.0).abs() < 0.2, "{}", sd.alpha);
        assert!((sd.sigma1 - libm::log(1000.0)).abs() < 1e-12 * libm::log(1000.0));
        assert!(alpha_vs_xi(&sd).abs() < 0.2);
    }

    #[test]
    fn zeta_y_small_cases() {
        let t = primes_up_to(10);
        let z = zeta_y(Complex64::new(2.0, 0.0), 10, &t).unwrap();
        let want: f64 = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| 1.0 / (1.0 - 1.0 / (p * p))).product();
        assert!((z.re - want).abs() < 1e-15 * want && z.im == 0.0);
        assert!(zeta_y(Complex64::new(0.0, 1.0), 10, &t).is_err());
        assert!(zeta_y(Complex64::new(1.0, 1.0), 20, &t).is_err());
    }

    #[test]
    fn derivatives_of_log_zeta() {
        let t = primes_up_to(300);
        let sd = solve_alpha(1e7, 300, &t).unwrap();
        let h = 1e-4;
        let l = |s: f64| log_zeta_y_real(s, 300, &t).unwrap();
        let d1 = (l(sd.alpha + h) - l(sd.alpha - h)) / (2.0 * h);
        assert!((d1 + sd.sigma1).abs() < 1e-6 * sd.sigma1);
        let d2 = (l(sd.alpha + h) - 2.0 * l(sd.alpha) + l(sd.alpha - h)) / (h * h);
        assert!((d2 - sd.sigma2).abs() < 1e-6 * sd.sigma2, "{d2} vs {}", sd.sigma2);
    }

    #[test]
    fn rejects_bad_input() {
        let t = primes_up_to(100);
        assert!(solve_alpha(10.0, 100, &t).is_err());
        assert!(solve_alpha(1e6, 1, &t).is_err());
        assert!(matches!(solve_alpha(1e6, 1000, &t), Err(Error::InsufficientPrimes { .. })));
    }
}
