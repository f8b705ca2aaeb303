//! The families `F_a = F₁ψ₂` and `G_a = F_a K_a = G₁ψ₁`, with `H₁`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::euler::{log_l_p, Certified, EulerProducts, LogProduct};
use super::zeta::{complex_zeta, g_m};
use super::ProductParams;
use crate::math::{divisors, factorize, gcd, largest_prime_factor, mobius, phi, prime_divisors};
use crate::saddle::{log1m, p_pow_neg};
use crate::{Error, Result};

/// `F_a`, `F₁`, `ψ₂` and the relative residual of `F_a = F₁ψ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FFamily {
    pub f_a: Certified,
    pub f_1: Certified,
    pub psi_2: Complex64,
    pub residual: f64,
}

/// Relative residuals of the `G` identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GResiduals {
    /// `G₁ = F₁`.
    pub g1_f1: f64,
    /// `G_a = F_a K_a`.
    pub ga_fa_ka: f64,
    /// `ψ₁ = ψ₂ K_a`.
    pub psi1_psi2_ka: f64,
    /// `G₁ = ζ(s₁,y) ζ(s₂+1) ζ(s₂+2) H₁ / ζ(s₁+s₂+1,y)`.
    pub g1_h1: f64,
    /// Closed form of `K_a` against its divisor sum.
    pub k_closed_sum: f64,
    /// `|K_a(s₁, 0) − 1|`.
    pub k_at_zero: f64,
}

impl GResiduals {
    pub fn max(&self) -> f64 {
        [self.g1_f1, self.ga_fa_ka, self.psi1_psi2_ka, self.g1_h1, self.k_closed_sum, self.k_at_zero]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFamily {
    pub g_a: Certified,
    pub g_1: Certified,
    pub k_a: Complex64,
    pub psi_1: Complex64,
    pub h_1: Certified,
    pub f: FFamily,
    pub residuals: GResiduals,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `Σ_{p ≤ y} −log(1 − p^{−w})` over the given primes, for any `w`.
fn log_zeta_finite(w: Complex64, ps: &[u64], acc: &mut LogProduct, sign: f64) {
    for &p in ps {
        acc.add(-log1m(p_pow_neg(p, w)) * sign);
    }
}

/// `L_p(s₁, s₂)` itself.
fn l_p(p: u64, s1: Complex64, s2: Complex64) -> Complex64 {
    log_l_p(p, s1, s2).exp()
}

/// `K_a(s₁, s₂)` in closed form.
pub fn k_closed(s1: Complex64, s2: Complex64, a: u64) -> Complex64 {
    let s12 = s1 + s2;
    let mut k = g_m(s1, a) / g_m(s12, a);
    for (p, nu) in factorize(a) {
        let pf = p as f64;
        let p_s1 = p_pow_neg(p, s1);
        let inner = p_s1 / (1.0 - p_s1) - (1.0 - p_pow_neg(p, s12)) / ((pf - 1.0) * (1.0 - p_pow_neg(p, s2 + 1.0)));
        k *= 1.0 + (1.0 - p_pow_neg(p, s2)) * p_pow_neg(p, s12 * nu as f64) * inner;
    }
    k
}

/// `K_a(s₁, s₂) = g_a(s₁) Σ_{k a' = a} k^{−s₁−s₂} Π_{p | k, p ∤ a'} (…)`.
pub fn k_sum(s1: Complex64, s2: Complex64, a: u64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for k in divisors(a) {
        let a1 = a / k;
        let mut t = p_pow_neg(k, s1 + s2);
        for p in prime_divisors(k) {
            if a1 % p != 0 {
                let pf = p as f64;
                t *= 1.0 / (1.0 - p_pow_neg(p, s1)) + (p_pow_neg(p, s2) - 1.0) / ((pf - 1.0) * (1.0 - p_pow_neg(p, s2 + 1.0)));
            }
        }
        total += t;
    }
    g_m(s1, a) * total
}

/// `ψ₂(s₁, s₂; a) = g_a(s₂+1) Π_{p | a} (1 + (1 − p^{1−s₁})/((1 − 1/p) p^{s₂+2}))^{−1}`.
pub fn psi_2(s1: Complex64, s2: Complex64, a: u64) -> Complex64 {
    let mut v = g_m(s2 + 1.0, a);
    for p in prime_divisors(a) {
        let pf = p as f64;
        v /= 1.0 + (1.0 - p_pow_neg(p, s1 - 1.0)) * p_pow_neg(p, s2 + 2.0) / (1.0 - 1.0 / pf);
    }
    v
}

/// `ψ₁(s₁, s₂; a)` as a sum over the factorizations `a = k a'`.
pub fn psi_1(s1: Complex64, s2: Complex64, a: u64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for k in divisors(a) {
        let a1 = a / k;
        let mut t = p_pow_neg(k, s1 + s2);
        for p in prime_divisors(a1) {
            t *= (1.0 - p_pow_neg(p, s1)) / l_p(p, s1, s2);
        }
        for p in prime_divisors(k) {
            if a1 % p != 0 {
                let pf = p as f64;
                let q = (1.0 - p_pow_neg(p, s1)) / (1.0 - p_pow_neg(p, s2 + 1.0)) / l_p(p, s1, s2);
                t *= 1.0 - q / (pf - 1.0);
            }
        }
        total += t;
    }
    total
}

impl EulerProducts {
    fn check_params(&self, params: &ProductParams) -> Result<u64> {
        let ProductParams { s1, s2, a, y } = *params;
        if a == 0 {
            return Err(Error::InvalidArgument("a must be nonzero".into()));
        }
        if !(s1.re > 0.0) {
            return Err(Error::OutsideDomain(format!("products need Re s1 > 0, got {s1}")));
        }
        if !(s2.re.is_finite() && s2.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("s2 must be finite, got {s2}")));
        }
        if y < 2 {
            return Err(Error::InvalidArgument(format!("y must be at least 2, got {y}")));
        }
        let a_abs = a.unsigned_abs();
        if largest_prime_factor(a_abs) > y {
            return Err(Error::InvalidArgument(format!("the prime factors of |a| = {a_abs} must not exceed y = {y}")));
        }
        self.primes().require(y)?;
        Ok(a_abs)
    }

    /// `Π_{p ≤ y} L_p(s₁, s₂) · Π_{p > y} E_p(s₂)`, i.e. `F₁/ζ(s₁, y)`.
    fn p_all(&self, s1: Complex64, s2: Complex64, y: u64) -> Result<Certified> {
        let tail = self.e_tail(s2, y)?;
        let mut acc = LogProduct::new();
        for &p in self.primes().up_to(y) {
            acc.add(log_l_p(p, s1, s2));
        }
        Ok(tail.mul(acc.certified(0.0)))
    }

    fn zeta_s1_y(&self, s1: Complex64, y: u64) -> Certified {
        let mut acc = LogProduct::new();
        log_zeta_finite(s1, self.primes().up_to(y), &mut acc, 1.0);
        acc.certified(0.0)
    }

    /// `F_a`, `F₁` and `ψ₂`, with `F_a` computed independently as
    /// `Φ₂(s₂; a) ζ(s₁, y) Π_{p ≤ y, p ∤ a} (1 − 1/(p^{s₁+s₂+1}(1 − 1/p + p^{−s₂−2})))`.
    pub fn f_family(&self, params: &ProductParams) -> Result<FFamily> {
        let a = self.check_params(params)?;
        let ProductParams { s1, s2, y, .. } = *params;
        let z1 = self.zeta_s1_y(s1, y);
        let f_1 = z1.mul(self.p_all(s1, s2, y)?);
        let psi_2 = psi_2(s1, s2, a);

        let mut acc = LogProduct::new();
        for &p in self.primes().up_to(y) {
            if a % p != 0 {
                let pf = p as f64;
                let d = 1.0 - 1.0 / pf + p_pow_neg(p, s2 + 2.0);
                acc.add(log1m(p_pow_neg(p, s1 + s2 + 1.0) / d));
            }
        }
        let f_a = self.phi2(s2, a as i64)?.mul(z1).mul(acc.certified(0.0));
        let residual = rel(f_a.value, f_1.value * psi_2);
        Ok(FFamily { f_a, f_1, psi_2, residual })
    }

    /// `G_a` from its expansion over `k a' = a` and squarefree `ℓ | k`,
    /// `(ℓ, a') = 1`, before any simplification.
    fn g_direct(&self, s1: Complex64, s2: Complex64, a: u64, y: u64, p_all: Certified) -> Certified {
        let mut total = Complex64::new(0.0, 0.0);
        for k in divisors(a) {
            let a1 = a / k;
            let mut base = p_pow_neg(k, s1 + s2);
            for p in prime_divisors(a1) {
                base /= l_p(p, s1, s2);
            }
            for l in divisors(k) {
                let mu = mobius(l);
                if mu == 0 || gcd(l, a1) != 1 {
                    continue;
                }
                let mut t = base * g_m(s1, a1 * l) * (mu as f64 / phi(l) as f64);
                for p in prime_divisors(l) {
                    t /= l_p(p, s1, s2) * (1.0 - p_pow_neg(p, s2 + 1.0));
                }
                total += t;
            }
        }
        self.zeta_s1_y(s1, y).mul(p_all).scale(total)
    }

    /// `H₁(s₁, s₂; y)`.
    pub fn h_1(&self, s1: Complex64, s2: Complex64, y: u64) -> Result<Certified> {
        self.primes().require(y)?;
        let tail = self.c_tail(s2, y)?;
        let mut acc = LogProduct::new();
        for &p in self.primes().up_to(y) {
            let pf = p as f64;
            let num = p_pow_neg(p, s2 + 2.0) + p_pow_neg(p, s1) - p_pow_neg(p, s1 + s2 + 1.0) - 1.0 / pf;
            let den = (1.0 - 1.0 / pf) * (1.0 - p_pow_neg(p, s1 + s2 + 1.0));
            acc.add(log1m(num * p_pow_neg(p, s2 + 2.0) / den));
        }
        Ok(tail.mul(acc.certified(0.0)))
    }

    /// `G_a`, `G₁`, `K_a`, `ψ₁`, `H₁` and the residuals of the identities
    /// linking them to the `F` family.
    pub fn g_family(&self, params: &ProductParams) -> Result<GFamily> {
        let f = self.f_family(params)?;
        let a = params.a.unsigned_abs();
        let ProductParams { s1, s2, y, .. } = *params;
        let p_all = self.p_all(s1, s2, y)?;
        let g_a = self.g_direct(s1, s2, a, y, p_all);
        let g_1 = self.g_direct(s1, s2, 1, y, p_all);
        let k_a = k_closed(s1, s2, a);
        let psi_1 = psi_1(s1, s2, a);
        let h_1 = self.h_1(s1, s2, y)?;

        let mut rhs = LogProduct::new();
        log_zeta_finite(s1, self.primes().up_to(y), &mut rhs, 1.0);
        log_zeta_finite(s1 + s2 + 1.0, self.primes().up_to(y), &mut rhs, -1.0);
        rhs.add(complex_zeta(s2 + 1.0)?.ln());
        rhs.add(complex_zeta(s2 + 2.0)?.ln());
        let g1_via_h1 = rhs.log().exp() * h_1.value;

        let residuals = GResiduals {
            g1_f1: rel(g_1.value, f.f_1.value),
            ga_fa_ka: rel(g_a.value, f.f_a.value * k_a),
            psi1_psi2_ka: rel(psi_1, f.psi_2 * k_a),
            g1_h1: rel(g_1.value, g1_via_h1),
            k_closed_sum: rel(k_a, k_sum(s1, s2, a)),
            k_at_zero: (k_closed(s1, Complex64::new(0.0, 0.0), a) - one()).norm(),
        };
        Ok(GFamily { g_a, g_1, k_a, psi_1, h_1, f, residuals })
    }

    /// `g_family` over many points; errors are returned per point.
    pub fn g_family_grid(&self, points: &[ProductParams], threads: usize) -> Vec<Result<GFamily>> {
        crate::parallel::map_blocks(points.len(), threads, |i| self.g_family(&points[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::Truncation;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn engine() -> EulerProducts {
        EulerProducts::new(Truncation::default()).unwrap()
    }

    #[test]
    fn f_identity_example() {
        let eng = engine();
        let f = eng.f_family(&ProductParams::new(c(0.8, 0.0), c(1.5, 0.0), 6, 50)).unwrap();
        assert!(f.residual < 1e-10, "{}", f.residual);
        let f = eng.f_family(&ProductParams::new(c(0.8, 0.3), c(1.5, -0.7), 1, 50)).unwrap();
        assert_eq!(f.psi_2, c(1.0, 0.0));
        assert!(rel(f.f_a.value, f.f_1.value) < 1e-13);
    }

    #[test]
    fn g_identities_at_prototype_point() {
        let eng = engine();
        for a in [1, 2, 6, 12, 30, 4, 9, -10] {
            let g = eng.g_family(&ProductParams::new(c(0.8, 0.3), c(1.5, -0.7), a, 50)).unwrap();
            assert!(g.residuals.max() < 1e-12, "a = {a}: {:?}", g.residuals);
        }
    }

    #[test]
    fn g_identities_left_of_the_line() {
        let eng = engine();
        for (s1, s2) in [(c(0.6, 2.0), c(-1.2, 5.0)), (c(0.9, -1.0), c(-0.4, -0.3)), (c(0.35, 0.0), c(-0.9, 12.0))] {
            for a in [2, 12, 30] {
                let g = eng.g_family(&ProductParams::new(s1, s2, a, 500)).unwrap();
                assert!(g.residuals.max() < 1e-10, "a = {a}, s = {s1}, {s2}: {:?}", g.residuals);
            }
        }
    }

    #[test]
    fn k_vanishing_s2() {
        for a in [2u64, 6, 12, 30] {
            let k = k_closed(c(0.7, 0.0), c(0.0, 0.0), a);
            assert!((k - 1.0).norm() < 1e-15);
            let k = k_sum(c(0.7, 0.0), c(0.0, 0.0), a);
            assert!((k - 1.0).norm() < 1e-14, "{a}: {k}");
        }
    }

    #[test]
    fn h1_literal_tail_factor_breaks_factorization() {
        // 1 + (1 − p^{s₂+1})/(p^{s₂+3}(1 − 1/p)) as printed differs from C_p(s₂)
        let s2 = c(1.5, -0.7);
        let p = 2u64;
        let pf = p as f64;
        let printed = 1.0 + (1.0 - p_pow_neg(p, -(s2 + 1.0))) * p_pow_neg(p, s2 + 3.0) / (1.0 - 1.0 / pf);
        let corrected = 1.0 + (1.0 - p_pow_neg(p, s2 + 1.0)) * p_pow_neg(p, s2 + 3.0) / (1.0 - 1.0 / pf);
        let cp = super::super::euler::log_c_p(p, s2).exp();
        assert!((corrected - cp).norm() < 1e-15);
        assert!((printed - cp).norm() > 0.1);
    }

    #[test]
    fn rejects_bad_params() {
        let eng = engine();
        let ok = ProductParams::new(c(0.8, 0.0), c(1.5, 0.0), 6, 50);
        assert!(eng.f_family(&ProductParams { a: 0, ..ok }).is_err());
        assert!(eng.f_family(&ProductParams { a: 106, ..ok }).is_err());
        assert!(matches!(eng.f_family(&ProductParams { s1: c(-0.1, 0.0), ..ok }), Err(Error::OutsideDomain(_))));
        assert!(matches!(eng.f_family(&ProductParams { s2: c(-1.6, 0.0), ..ok }), Err(Error::OutsideDomain(_))));
    }
}
