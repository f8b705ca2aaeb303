//! Exact counting functions over a [`SmoothIndex`].
//!
//! Real cut points `x` are truncated to `⌊x⌋`; the index must cover that
//! bound with the same `y`.

use alloc::format;
use alloc::vec::Vec;

use crate::exact::RationalSum;
use crate::math::{gcd, phi, prime_divisors, CompensatedSum};
use crate::parallel::map_blocks;
use crate::sieve::{primes_up_to, sieve_segment, SmoothIndex};
use crate::{Error, Result};

/// Largest `x` accepted by [`phi_mu_exact`].
pub const PHI_MU_EXACT_LIMIT: u64 = 100_000;

/// `⌊x⌋` for a real cut point, `0` below `1`.
pub fn floor_u64(x: f64) -> u64 {
    if x.is_nan() || x < 1.0 {
        0
    } else {
        x as u64
    }
}

fn check(index: &SmoothIndex, t: u64, y: u64) -> Result<()> {
    if index.y() != y {
        return Err(Error::IndexMismatch(format!("index built for y = {}, query has y = {y}", index.y())));
    }
    if t > index.x() {
        return Err(Error::IndexMismatch(format!("index covers n <= {}, query needs {t}", index.x())));
    }
    Ok(())
}

/// `Ψ(x, y)`.
pub fn psi(x: f64, y: u64, index: &SmoothIndex) -> Result<u64> {
    let t = floor_u64(x);
    check(index, t, y)?;
    Ok(index.count(t))
}

/// Squarefree divisors `d` of the product of `primes`, paired with `μ(d)`.
pub fn signed_squarefree_divisors(primes: &[u64]) -> Vec<(u64, i64)> {
    let mut out = Vec::with_capacity(1 << primes.len());
    out.push((1u64, 1i64));
    for &p in primes {
        for i in 0..out.len() {
            let (d, m) = out[i];
            out.push((d * p, -m));
        }
    }
    out
}

/// `Ψ_q(t, y)` from the prime divisors of `q` that are `≤ y`.
pub(crate) fn psi_coprime_with(t: u64, small_primes_of_q: &[u64], index: &SmoothIndex) -> i64 {
    let mut s = 0i64;
    for (d, m) in signed_squarefree_divisors(small_primes_of_q) {
        s += m * index.count(t / d) as i64;
    }
    s
}

/// `Ψ_q(x, y)`, counted by inclusion–exclusion over the squarefree divisors
/// of the `y`-friable part of `rad(q)`.
pub fn psi_coprime(x: f64, y: u64, q: u64, index: &SmoothIndex) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let t = floor_u64(x);
    check(index, t, y)?;
    let ps: Vec<u64> = prime_divisors(q).into_iter().filter(|&p| p <= y).collect();
    Ok(psi_coprime_with(t, &ps, index) as u64)
}

/// Parameters of a progression count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressionQuery {
    pub x: f64,
    pub y: u64,
    pub a: i64,
    pub q: u64,
}

impl ProgressionQuery {
    pub fn new(x: f64, y: u64, a: i64, q: u64) -> Self {
        Self { x, y, a, q }
    }
}

/// `1_{S(x,y)}(a)`; zero for `a ≤ 0`.
pub fn in_friable_set(a: i64, t: u64, index: &SmoothIndex) -> bool {
    a >= 1 && (a as u64) <= t && index.contains(a as u64)
}

/// `#{n ≤ t : n ∈ S, n ≡ a (mod q)}` by striding through the index.
pub(crate) fn progression_count(t: u64, a: i64, q: u64, index: &SmoothIndex) -> u64 {
    if q == 1 {
        return index.count(t);
    }
    let r = a.rem_euclid(q as i64) as u64;
    let mut n = if r == 0 { q } else { r };
    let mut c = 0;
    while n <= t {
        c += index.contains(n) as u64;
        n += q;
    }
    c
}

/// `Ψ(x, y; a, q)`, or `Ψ*(x, y; a, q) = Ψ(x, y; a, q) − 1_{S(x,y)}(a)` when `starred`.
/// Negative `a` is reduced to its least nonnegative residue.
pub fn psi_progression(query: ProgressionQuery, index: &SmoothIndex, starred: bool) -> Result<i64> {
    let ProgressionQuery { x, y, a, q } = query;
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let t = floor_u64(x);
    check(index, t, y)?;
    let mut c = progression_count(t, a, q, index) as i64;
    if starred && in_friable_set(a, t, index) {
        c -= 1;
    }
    Ok(c)
}

/// `E*(x, y; a, q) = Ψ*(x, y; a, q) − Ψ_{q/d}(x/d, y)/φ(q/d)` with `d = (a, q)`;
/// for `d = 1` this is the usual coprime definition.
pub fn e_star(query: ProgressionQuery, index: &SmoothIndex) -> Result<RationalSum> {
    let ProgressionQuery { x, y, a, q } = query;
    if a == 0 {
        return Err(Error::InvalidArgument("a must be nonzero".into()));
    }
    let star = psi_progression(query, index, true)?;
    let d = gcd(a.unsigned_abs(), q);
    let qd = q / d;
    let t = floor_u64(x) / d;
    let ps: Vec<u64> = prime_divisors(qd).into_iter().filter(|&p| p <= y).collect();
    let expected = psi_coprime_with(t, &ps, index);
    let mut e = RationalSum::from_integer(star as i128);
    e.add_frac(-(expected as i128), phi(qd));
    Ok(e)
}

/// Terms `μ(n)/n` for `n` in `[lo, hi)` with `P⁻(n) > y`.
fn phi_mu_terms(lo: u64, hi: u64, y: u64, mut f: impl FnMut(i8, u64)) {
    let primes = primes_up_to(crate::math::isqrt(hi - 1));
    let seg = sieve_segment(lo, hi, &primes).expect("prime table covers the window");
    for n in lo..hi {
        let m = seg.mu(n);
        if m != 0 && seg.spf(n) > y {
            f(m, n);
        }
    }
}

const PHI_MU_SEGMENT: u64 = 1 << 20;

/// `Φ_μ(x, y) = Σ_{n ≤ x, P⁻(n) > y} μ(n)/n`, compensated floating sum.
pub fn phi_mu(x: f64, y: u64, threads: usize) -> f64 {
    let t = floor_u64(x);
    if t == 0 {
        return 0.0;
    }
    let n_seg = t.div_ceil(PHI_MU_SEGMENT) as usize;
    let parts = map_blocks(n_seg, threads, |i| {
        let lo = 1 + i as u64 * PHI_MU_SEGMENT;
        let hi = (lo + PHI_MU_SEGMENT).min(t + 1);
        let mut s = CompensatedSum::new();
        phi_mu_terms(lo, hi, y, |m, n| s.add(m as f64 / n as f64));
        s.value()
    });
    parts.into_iter().collect::<CompensatedSum>().value()
}

/// `Φ_μ(x, y)` as an exact rational, for `x ≤` [`PHI_MU_EXACT_LIMIT`].
pub fn phi_mu_exact(x: f64, y: u64) -> Result<RationalSum> {
    let t = floor_u64(x);
    if t > PHI_MU_EXACT_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "exact Phi_mu is limited to x <= {PHI_MU_EXACT_LIMIT}, got {t}"
        )));
    }
    let mut s = RationalSum::new();
    if t >= 1 {
        phi_mu_terms(1, t + 1, y, |m, n| s.add_frac(m as i128, n));
    }
    Ok(s)
}
