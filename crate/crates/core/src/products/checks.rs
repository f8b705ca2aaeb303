//! Numerical checks of the approximation `ζ(s, y) ≈ ζ(s)(s − 1)(log y) ρ̂((s − 1) log y)`
//! and of the size bounds on `ψ₁`, `ψ₂`.

use alloc::format;

use num_complex::Complex64;

use super::families::{psi_1, psi_2};
use super::zeta::complex_zeta;
use super::ProductParams;
use crate::dickman::{l_gauge, rho_hat};
use crate::math::{tau, tau3};
use crate::saddle::zeta_y;
use crate::sieve::PrimeTable;
use crate::{Error, Result};

/// Relative deviation `|ζ(s, y)/(ζ(s)(s − 1)(log y) ρ̂((s − 1) log y)) − 1|`.
///
/// `s` must satisfy `Re s ≥ 1 − (log y)^{−2/5−ε}` and `|Im s| ≤ L_ε(y)`.
pub fn zeta_y_approx_check(s: Complex64, y: u64, epsilon: f64, primes: &PrimeTable) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.6) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 0.6), got {epsilon}")));
    }
    if y < 3 {
        return Err(Error::InvalidArgument(format!("y must be at least 3, got {y}")));
    }
    let ly = libm::log(y as f64);
    let re_min = 1.0 - libm::pow(ly, -0.4 - epsilon);
    let im_max = l_gauge(epsilon, y as f64);
    if s.re < re_min || s.im.abs() > im_max {
        return Err(Error::OutsideDomain(format!(
            "s = {s} is outside Re s >= {re_min:.6}, |Im s| <= {im_max:.6}"
        )));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("the comparison is a limit at s = 1".into()));
    }
    let lhs = zeta_y(s, y, primes)?;
    let z = s - 1.0;
    let rhs = complex_zeta(s)? * z * ly * rho_hat(z * ly);
    Ok((lhs / rhs - 1.0).norm())
}

/// Outcome of [`psi1_bound_check`]: each bound as `(lhs, rhs)` when it applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi1Bounds {
    pub psi_1: Complex64,
    pub psi_2: Complex64,
    /// `|ψ₁| + |ψ₂| ≤ C τ(a)`, for `Re s₁ = α`, `Re s₂ > −1`.
    pub on_line: Option<(f64, f64)>,
    /// `|ψ₁| ≤ C |a|^{2β₁+2β₂} τ₃(a)²`, for `β₁, β₂ ∈ [0, 1/6]`.
    pub shifted: Option<(f64, f64)>,
}

/// Checks the size bounds on `ψ₁, ψ₂` with constant `constant` at a point
/// described relative to the saddle abscissa `alpha`:
/// `β₁ = α − Re s₁`, `β₂ = max(0, −α − Re s₂)`.
pub fn psi1_bound_check(params: &ProductParams, alpha: f64, constant: f64) -> Result<Psi1Bounds> {
    let ProductParams { s1, s2, a, .. } = *params;
    if a == 0 {
        return Err(Error::InvalidArgument("a must be nonzero".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let a = a.unsigned_abs();
    let p1 = psi_1(s1, s2, a);
    let p2 = psi_2(s1, s2, a);
    let beta1 = alpha - s1.re;
    let beta2 = (-alpha - s2.re).max(0.0);
    let tol = 1e-12;

    let on_line = (beta1.abs() <= tol && s2.re > -1.0).then(|| (p1.norm() + p2.norm(), constant * tau(a) as f64));
    let in_band = |b: f64| (-tol..=1.0 / 6.0 + tol).contains(&b);
    let shifted = (in_band(beta1) && in_band(beta2)).then(|| {
        let b = beta1.max(0.0) + beta2;
        let t3 = tau3(a) as f64;
        (p1.norm(), constant * libm::pow(a as f64, 2.0 * b) * t3 * t3)
    });
    if on_line.is_none() && shifted.is_none() {
        return Err(Error::OutsideDomain(format!(
            "(s1, s2) = ({s1}, {s2}) is outside both bound regions for alpha = {alpha}"
        )));
    }
    for (name, bound) in [("|psi1| + |psi2| <= C tau(a)", on_line), ("|psi1| <= C |a|^(2b1+2b2) tau3(a)^2", shifted)] {
        if let Some((lhs, rhs)) = bound {
            if !(lhs <= rhs) {
                return Err(Error::BoundViolation(format!("{name} fails for a = {a}: {lhs:e} > {rhs:e}")));
            }
        }
    }
    Ok(Psi1Bounds { psi_1: p1, psi_2: p2, on_line, shifted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddle::solve_alpha;
    use crate::sieve::primes_up_to;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_y_approximation_points() {
        let t = primes_up_to(1_000_000);
        let d = zeta_y_approx_check(c(1.01, 0.5), 10_000, 0.1, &t).unwrap();
        assert!(d < 0.1, "{d}");
        let sd = solve_alpha(1e8, 10_000, &t).unwrap();
        let d_alpha = zeta_y_approx_check(c(sd.alpha, 0.0), 10_000, 0.1, &t).unwrap();
        assert!(d_alpha < 0.1, "{d_alpha}");
        let d4 = zeta_y_approx_check(c(1.001, 0.0), 10_000, 0.1, &t).unwrap();
        let d6 = zeta_y_approx_check(c(1.001, 0.0), 1_000_000, 0.1, &t).unwrap();
        assert!(d6 < d4, "{d6} vs {d4}");
    }

    #[test]
    fn zeta_y_region() {
        let t = primes_up_to(10_000);
        assert!(matches!(zeta_y_approx_check(c(0.3, 0.0), 10_000, 0.1, &t), Err(Error::OutsideDomain(_))));
        assert!(matches!(zeta_y_approx_check(c(1.0, 500.0), 10_000, 0.1, &t), Err(Error::OutsideDomain(_))));
        assert!(matches!(zeta_y_approx_check(c(1.0, 0.0), 10_000, 0.1, &t), Err(Error::Pole(_))));
    }

    #[test]
    fn psi_bounds_trivial_modulus() {
        let p = ProductParams::new(c(0.7, 3.0), c(0.5, -2.0), 1, 100);
        let b = psi1_bound_check(&p, 0.7, 100.0).unwrap();
        assert!((b.psi_1 - 1.0).norm() < 1e-15 && (b.psi_2 - 1.0).norm() < 1e-15);
        assert_eq!(b.on_line.unwrap().0, 2.0);
    }

    #[test]
    fn psi_bounds_boundary_and_violation() {
        let alpha = 0.7;
        let s1 = c(alpha - 1.0 / 6.0, 1.0);
        let s2 = c(-alpha - 1.0 / 6.0, 4.0);
        let b = psi1_bound_check(&ProductParams::new(s1, s2, 210, 300), alpha, 100.0).unwrap();
        assert!(b.shifted.is_some() && b.on_line.is_none());
        assert!(matches!(
            psi1_bound_check(&ProductParams::new(s1, s2, 210, 300), alpha, 1e-6),
            Err(Error::BoundViolation(_))
        ));
        assert!(psi1_bound_check(&ProductParams::new(c(0.1, 0.0), s2, 6, 300), alpha, 100.0).is_err());
    }
}
