//! Exact finite sums: `σ`, `σ₁`, `σ₂`, `σ̃₁` and the gcd-extended aggregate.
//!
//! Real cut points follow the definitions literally: `q ≤ x/M` means
//! `q ≤ ⌊x/M⌋`, `x/M < q ≤ x` means `⌊x/M⌋ < q ≤ ⌊x⌋` and `r < M/k` is
//! tested as `r·k < M`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::factor::{factor_block, Factored, Q_BLOCK};
use super::SigmaQuery;
use crate::counts::{floor_u64, in_friable_set, progression_count, psi_coprime_with};
use crate::exact::RationalSum;
use crate::math::{divisors, gcd, isqrt, largest_prime_factor, mobius, phi, prime_divisors};
use crate::parallel::map_blocks;
use crate::sieve::{primes_up_to, SmoothIndex};
use crate::{Error, Result};

fn check_index(query: &SigmaQuery, index: &SmoothIndex) -> Result<u64> {
    query.validate()?;
    let t = floor_u64(query.x);
    if index.y() != query.y {
        return Err(Error::IndexMismatch(format!("index built for y = {}, query has y = {}", index.y(), query.y)));
    }
    if t > index.x() {
        return Err(Error::IndexMismatch(format!("index covers n <= {}, query needs {t}", index.x())));
    }
    Ok(t)
}

/// `⌊x/M⌋`.
fn q_cut(x: f64, m: f64) -> u64 {
    floor_u64(x / m)
}

/// Folds `f` over the factored moduli `lo ≤ q ≤ hi` in fixed blocks and
/// sums the block results in order.
fn reduce_q<F>(lo: u64, hi: u64, threads: usize, f: F) -> RationalSum
where
    F: Fn(&Factored, &mut RationalSum) + Sync + Send,
{
    if lo > hi {
        return RationalSum::new();
    }
    let primes = primes_up_to(isqrt(hi));
    let n_blocks = (hi - lo + 1).div_ceil(Q_BLOCK) as usize;
    let parts = map_blocks(n_blocks, threads, |b| {
        let blo = lo + b as u64 * Q_BLOCK;
        let bhi = (blo + Q_BLOCK).min(hi + 1);
        let mut acc = RationalSum::new();
        for fq in factor_block(blo, bhi, &primes) {
            f(&fq, &mut acc);
        }
        acc
    });
    parts.into_iter().sum()
}

/// `Σ_{lo ≤ q ≤ hi, (q, a) = 1} E*(x, y; a, q)`.
fn e_star_range(query: &SigmaQuery, index: &SmoothIndex, t: u64, lo: u64, hi: u64) -> RationalSum {
    let SigmaQuery { y, a, threads, .. } = *query;
    let a_abs = a.unsigned_abs();
    let a_in_s = in_friable_set(a, t, index) as i128;
    reduce_q(lo.max(1), hi, threads, |fq, acc| {
        if gcd(fq.q, a_abs) != 1 {
            return;
        }
        let star = progression_count(t, a, fq.q, index) as i128 - a_in_s;
        let expected = psi_coprime_with(t, fq.primes_le(y), index);
        acc.add_int(star);
        acc.add_frac(-(expected as i128), fq.phi);
    })
}

/// `σ(x, y, M; a) = Σ_{q ≤ x/M, (q, a) = 1} E*(x, y; a, q)`, exactly.
pub fn sigma_brute(query: &SigmaQuery, index: &SmoothIndex) -> Result<RationalSum> {
    let t = check_index(query, index)?;
    Ok(e_star_range(query, index, t, 1, q_cut(query.x, query.m)))
}

/// `σ₁` and `σ₂` over `x/M < q ≤ x`, `(q, a) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaSplit {
    pub sigma1: i128,
    pub sigma2: RationalSum,
}

/// `σ₁ = Σ Ψ*(x, y; a, q)` and `σ₂ = Σ Ψ_q(x, y)/φ(q)`, both by a direct q-loop.
pub fn sigma_split(query: &SigmaQuery, index: &SmoothIndex) -> Result<SigmaSplit> {
    let t = check_index(query, index)?;
    let SigmaQuery { y, a, threads, .. } = *query;
    let a_abs = a.unsigned_abs();
    let a_in_s = in_friable_set(a, t, index) as i128;
    let lo = q_cut(query.x, query.m) + 1;
    let s1 = reduce_q(lo, t, threads, |fq, acc| {
        if gcd(fq.q, a_abs) == 1 {
            acc.add_int(progression_count(t, a, fq.q, index) as i128 - a_in_s);
        }
    });
    let sigma2 = reduce_q(lo, t, threads, |fq, acc| {
        if gcd(fq.q, a_abs) == 1 {
            acc.add_frac(psi_coprime_with(t, fq.primes_le(y), index) as i128, fq.phi);
        }
    });
    debug_assert_eq!(s1.denominators(), 0);
    Ok(SigmaSplit { sigma1: s1.integer_part(), sigma2 })
}

/// `σ₂ = Σ_{n ∈ S(x, y)} Σ_{x/M < q ≤ x, (q, na) = 1} 1/φ(q)`: the friable
/// `n` are enumerated and grouped by their set of prime factors, so the
/// count of `n` coprime to each `q` is never obtained by inclusion–exclusion.
pub fn sigma2_interchange(query: &SigmaQuery, index: &SmoothIndex) -> Result<RationalSum> {
    let t = check_index(query, index)?;
    let SigmaQuery { y, a, threads, .. } = *query;
    let small = primes_up_to(y);
    let words = small.len().div_ceil(64).max(1);
    let mask_of = |ps: &[u64]| {
        let mut m = vec![0u64; words];
        for &p in ps {
            let i = small.pi(p) - 1;
            m[i / 64] |= 1 << (i % 64);
        }
        m
    };
    let mut classes: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    if t >= 1 {
        let primes = primes_up_to(isqrt(t));
        let mut lo = 1;
        while lo <= t {
            let hi = (lo + Q_BLOCK).min(t + 1);
            for fq in factor_block(lo, hi, &primes) {
                if index.contains(fq.q) {
                    *classes.entry(mask_of(fq.primes())).or_insert(0) += 1;
                }
            }
            lo = hi;
        }
    }
    let classes: Vec<(Vec<u64>, u64)> = classes.into_iter().collect();
    let a_abs = a.unsigned_abs();
    let lo = q_cut(query.x, query.m) + 1;
    Ok(reduce_q(lo, t, threads, |fq, acc| {
        if gcd(fq.q, a_abs) != 1 {
            return;
        }
        let qm = mask_of(fq.primes_le(y));
        let w: u64 = classes
            .iter()
            .filter(|(m, _)| m.iter().zip(&qm).all(|(u, v)| u & v == 0))
            .map(|(_, c)| c)
            .sum();
        acc.add_frac(w as i128, fq.phi);
    }))
}

/// Both sides of `Σ_{x/M₂ < q ≤ x/M₁, (q,a)=1} E* = σ₁(M₂) − σ₁(M₁) − σ₂(M₂) + σ₂(M₁)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffSigma {
    pub direct: RationalSum,
    pub reconstructed: RationalSum,
}

/// Evaluates the window identity for `M₁ = query.m < m2`.
pub fn diffsigma(query: &SigmaQuery, m2: f64, index: &SmoothIndex) -> Result<DiffSigma> {
    let t = check_index(query, index)?;
    if !(m2 > query.m) {
        return Err(Error::InvalidArgument(format!("need M2 > M1, got M1 = {}, M2 = {m2}", query.m)));
    }
    let q2 = SigmaQuery { m: m2, ..*query };
    let direct = e_star_range(query, index, t, q_cut(query.x, m2) + 1, q_cut(query.x, query.m));
    let s1 = sigma_split(query, index)?;
    let s2 = sigma_split(&q2, index)?;
    let mut reconstructed = RationalSum::from_integer(s2.sigma1 - s1.sigma1);
    reconstructed -= &s2.sigma2;
    reconstructed += &s1.sigma2;
    Ok(DiffSigma { direct, reconstructed })
}

/// `σ̃₁` by its two finite expansions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sigma1Tilde {
    /// Outer sum over `r`, counts `Ψ_{a'rℓ₁}` by inclusion–exclusion.
    pub r_outer: RationalSum,
    /// Outer sum over friable `n`, inner sum over `r < nM/x`.
    pub n_outer: RationalSum,
    /// Whether `|a| ≤ y` and `|a| ≤ M` hold.
    pub assumptions_hold: bool,
}

impl Sigma1Tilde {
    pub fn difference(&self) -> RationalSum {
        let mut d = self.r_outer.clone();
        d -= &self.n_outer;
        d
    }
}

/// `σ̃₁(x, y, M; a)` computed both ways. Runs outside `|a| ≤ min(y, M)` are
/// allowed and flagged.
pub fn sigma1_tilde(query: &SigmaQuery, index: &SmoothIndex) -> Result<Sigma1Tilde> {
    check_index(query, index)?;
    let SigmaQuery { x, y, m, a, .. } = *query;
    let a_abs = a.unsigned_abs();
    let cut = |r: u64| floor_u64(r as f64 * x / m);
    let mut r_outer = RationalSum::new();
    let mut n_outer = RationalSum::new();
    for k in divisors(a_abs) {
        let a1 = a_abs / k;
        let top = floor_u64(x / k as f64);
        let r_max = (1..).take_while(|&r: &u64| ((r * k) as f64) < m).last().unwrap_or(0);
        for l in divisors(k) {
            let mu = mobius(l) as i128;
            if mu == 0 || gcd(l, a1) != 1 {
                continue;
            }
            let phi_rl: Vec<u64> = (0..=r_max).map(|r| if r == 0 { 0 } else { phi(r * l) }).collect();
            for r in 1..=r_max {
                if gcd(r, a1) != 1 {
                    continue;
                }
                let ps: Vec<u64> = prime_divisors(a1 * r * l).into_iter().filter(|&p| p <= y).collect();
                let c = psi_coprime_with(top, &ps, index) - psi_coprime_with(cut(r), &ps, index);
                r_outer.add_frac(mu * c as i128, phi_rl[r as usize]);
            }
            if r_max == 0 {
                continue;
            }
            index.for_each_in(cut(1) + 1, top, |n| {
                if gcd(n, a1 * l) != 1 {
                    return;
                }
                let mut r = 1;
                while r <= r_max && cut(r) < n {
                    if gcd(r, a1 * n) == 1 {
                        n_outer.add_frac(mu, phi_rl[r as usize]);
                    }
                    r += 1;
                }
            });
        }
    }
    let assumptions_hold = a_abs <= y && (a_abs as f64) <= m;
    Ok(Sigma1Tilde { r_outer, n_outer, assumptions_hold })
}

/// Both sides of `Σ_{q ≤ x/M} E*(x, y; a, q) = Σ_{d | a} σ(x/d, y, M; a/d)`,
/// the left side summing over every `q` with the gcd-extended `E*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorAggregate {
    pub all_moduli: RationalSum,
    pub divisor_sum: RationalSum,
}

/// Needs `P(|a|) ≤ y`, so that `d | a` keeps friability when divided out.
pub fn remark3_aggregate(query: &SigmaQuery, index: &SmoothIndex) -> Result<DivisorAggregate> {
    let t = check_index(query, index)?;
    let SigmaQuery { x, y, m, a, threads, .. } = *query;
    let a_abs = a.unsigned_abs();
    if largest_prime_factor(a_abs) > y {
        return Err(Error::InvalidArgument(format!("the aggregate needs P(|a|) <= y, got a = {a}, y = {y}")));
    }
    let a_in_s = in_friable_set(a, t, index) as i128;
    let all_moduli = reduce_q(1, q_cut(x, m), threads, |fq, acc| {
        let d = gcd(fq.q, a_abs);
        let qd = fq.q / d;
        let ps: Vec<u64> = fq.primes_le(y).iter().copied().filter(|&p| qd % p == 0).collect();
        let phi_qd = fq.primes().iter().filter(|&&p| qd % p == 0).fold(qd, |acc, &p| acc / p * (p - 1));
        acc.add_int(progression_count(t, a, fq.q, index) as i128 - a_in_s);
        acc.add_frac(-(psi_coprime_with(t / d, &ps, index) as i128), phi_qd);
    });
    let mut divisor_sum = RationalSum::new();
    for d in divisors(a_abs) {
        let sub = SigmaQuery { x: x / d as f64, a: a / d as i64, ..*query };
        divisor_sum += sigma_brute(&sub, index)?;
    }
    Ok(DivisorAggregate { all_moduli, divisor_sum })
}
