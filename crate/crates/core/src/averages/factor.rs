//! Block factorization of consecutive moduli.

use alloc::vec::Vec;

use crate::math::isqrt;
use crate::sieve::PrimeTable;

/// No integer below 2⁶⁴ has more distinct prime factors.
const MAX_DISTINCT: usize = 15;

/// Moduli per block in the q-loops.
pub(crate) const Q_BLOCK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Factored {
    pub q: u64,
    pub phi: u64,
    len: u8,
    ps: [u64; MAX_DISTINCT],
}

impl Factored {
    /// Distinct prime factors in increasing order.
    pub fn primes(&self) -> &[u64] {
        &self.ps[..self.len as usize]
    }

    /// The prime factors `≤ y`, a prefix of [`primes`](Self::primes).
    pub fn primes_le(&self, y: u64) -> &[u64] {
        let ps = self.primes();
        &ps[..ps.partition_point(|&p| p <= y)]
    }
}

/// Factors every `q` in `[lo, hi)`, `lo ≥ 1`; `primes` must reach `√(hi − 1)`.
pub(crate) fn factor_block(lo: u64, hi: u64, primes: &PrimeTable) -> Vec<Factored> {
    debug_assert!(lo >= 1 && lo <= hi);
    let n = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut out: Vec<Factored> =
        (lo..hi).map(|q| Factored { q, phi: q, len: 0, ps: [0; MAX_DISTINCT] }).collect();
    let root = isqrt(hi.saturating_sub(1));
    debug_assert!(primes.limit() >= root);
    for &p in primes.up_to(root) {
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            let f = &mut out[i];
            f.ps[f.len as usize] = p;
            f.len += 1;
            f.phi = f.phi / p * (p - 1);
            while rem[i] % p == 0 {
                rem[i] /= p;
            }
            m += p;
        }
    }
    for i in 0..n {
        if rem[i] > 1 {
            let p = rem[i];
            let f = &mut out[i];
            f.ps[f.len as usize] = p;
            f.len += 1;
            f.phi = f.phi / p * (p - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{phi, prime_divisors};
    use crate::sieve::primes_up_to;

    #[test]
    fn matches_trial_division() {
        let t = primes_up_to(2000);
        for (lo, hi) in [(1u64, 500u64), (999_000, 1_001_000), (3_999_000, 4_000_000)] {
            for f in factor_block(lo, hi, &t) {
                assert_eq!(f.primes(), prime_divisors(f.q).as_slice(), "q = {}", f.q);
                assert_eq!(f.phi, phi(f.q));
            }
        }
        let f = factor_block(30, 31, &t)[0];
        assert_eq!(f.primes_le(3), &[2, 3]);
        assert_eq!(factor_block(1, 2, &t)[0].primes(), &[] as &[u64]);
    }
}
