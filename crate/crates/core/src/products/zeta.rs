//! Riemann `ζ(s)` for complex `s` by Euler–Maclaurin summation.

use alloc::format;

use num_complex::Complex64;

use crate::math::{prime_divisors, ComplexSum};
use crate::saddle::p_pow_neg;
use crate::{Error, Result};

/// `B_{2k}/(2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// `ζ(s)`, accurate to about `10⁻¹⁴` relative for `Re s ≥ −2`, `|Im s| ≤ 10⁴`.
///
/// The shift is `N = max(20, ⌈|s|⌉)` and ten Bernoulli corrections are used.
pub fn complex_zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta(s) at s = 1".into()));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("zeta needs a finite argument, got {s}")));
    }
    let n = libm::ceil(s.norm()).max(20.0) as u64;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = ComplexSum::new();
    for k in 1..n {
        acc.add(p_pow_neg(k, s));
    }
    let nf = n as f64;
    let n_s = p_pow_neg(n, s);
    acc.add(n_s * nf / (s - one));
    acc.add(n_s * 0.5);
    // s(s+1)…(s+2k−2) N^{−s−2k+1}
    let mut rising = s;
    let mut power = n_s / nf;
    for (k, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = rising * power * *c;
        acc.add(term);
        let j = 2.0 * k as f64;
        rising *= (s + (j + 1.0)) * (s + (j + 2.0));
        power /= nf * nf;
    }
    Ok(acc.value())
}

/// `g_m(s) = Π_{p | m} (1 − p^{−s})`.
pub fn g_m(s: Complex64, m: u64) -> Complex64 {
    assert!(m >= 1, "g_m needs m >= 1");
    prime_divisors(m)
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, p| acc * (1.0 - p_pow_neg(p, s)))
}
