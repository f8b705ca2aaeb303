//! Prime tables, windowed factor sieves and the friable-integer bitset.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::isqrt;
use crate::parallel::map_blocks;
use crate::{Error, Result};

/// `spf(1)`: stands for `P⁻(1) = +∞`.
pub const SPF_INFINITY: u64 = u64::MAX;

/// Bits per prefix-count block of a [`SmoothIndex`].
pub const BLOCK_BITS: u64 = 4096;
const BLOCK_WORDS: usize = (BLOCK_BITS / 64) as usize;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `≤ t` (for `t ≤ limit`).
    pub fn pi(&self, t: u64) -> usize {
        self.primes.partition_point(|&p| p <= t)
    }

    /// The primes `≤ t`.
    pub fn up_to(&self, t: u64) -> &[u64] {
        &self.primes[..self.pi(t)]
    }

    /// Fails unless the table contains every prime `≤ needed`.
    pub fn require(&self, needed: u64) -> Result<()> {
        if self.limit >= needed {
            Ok(())
        } else {
            Err(Error::InsufficientPrimes { needed, limit: self.limit })
        }
    }
}

/// Segmented sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> PrimeTable {
    let mut primes = Vec::new();
    if limit < 2 {
        return PrimeTable { limit, primes };
    }
    let r = isqrt(limit);
    let mut small = vec![true; r as usize + 1];
    let mut base = Vec::new();
    for i in 2..=r as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= r as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    const SEG: u64 = 1 << 18;
    let mut flags = vec![true; SEG as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEG).min(limit + 1);
        let w = (hi - lo) as usize;
        flags[..w].fill(true);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m < hi {
                flags[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &f) in flags[..w].iter().enumerate() {
            if f {
                primes.push(lo + i as u64);
            }
        }
        lo = hi;
    }
    PrimeTable { limit, primes }
}

/// Largest prime factor, smallest prime factor and Möbius value for every
/// integer of a window `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSegment {
    lo: u64,
    hi: u64,
    lpf: Vec<u64>,
    spf: Vec<u64>,
    mu: Vec<i8>,
}

impl FactorSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    fn slot(&self, n: u64) -> usize {
        assert!(self.lo <= n && n < self.hi, "{n} outside window [{}, {})", self.lo, self.hi);
        (n - self.lo) as usize
    }

    /// `P(n)`, with `P(1) = 1`.
    pub fn lpf(&self, n: u64) -> u64 {
        self.lpf[self.slot(n)]
    }

    /// `P⁻(n)`, with `P⁻(1) =` [`SPF_INFINITY`].
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[self.slot(n)]
    }

    pub fn mu(&self, n: u64) -> i8 {
        self.mu[self.slot(n)]
    }
}

/// Factors the window `[lo, hi)`. The table must reach `⌊√(hi−1)⌋`.
pub fn sieve_segment(lo: u64, hi: u64, primes: &PrimeTable) -> Result<FactorSegment> {
    if lo < 1 || hi <= lo {
        return Err(Error::InvalidArgument(format!("window [{lo}, {hi}) must satisfy 1 <= lo < hi")));
    }
    let root = isqrt(hi - 1);
    primes.require(root)?;
    let w = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut lpf = vec![1u64; w];
    let mut spf = vec![SPF_INFINITY; w];
    let mut mu = vec![1i8; w];
    for &p in primes.up_to(root) {
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            if spf[i] == SPF_INFINITY {
                spf[i] = p;
            }
            lpf[i] = p;
            rem[i] /= p;
            if rem[i] % p == 0 {
                mu[i] = 0;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                }
            } else {
                mu[i] = -mu[i];
            }
            m += p;
        }
    }
    for i in 0..w {
        if rem[i] > 1 {
            // a single prime above √(hi−1) remains
            lpf[i] = rem[i];
            if spf[i] == SPF_INFINITY {
                spf[i] = rem[i];
            }
            mu[i] = -mu[i];
        }
    }
    Ok(FactorSegment { lo, hi, lpf, spf, mu })
}

/// Construction knobs for [`SmoothIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Integers per segment; rounded up to a multiple of [`BLOCK_BITS`].
    pub segment_size: u64,
    /// Worker threads, `0` for all available.
    pub threads: usize,
    /// Upper bound in bytes for the index plus live segment buffers.
    pub memory_budget: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self { segment_size: 1 << 22, threads: 0, memory_budget: 4 << 30 }
    }
}

impl SieveConfig {
    fn segment(&self) -> u64 {
        self.segment_size.max(1).div_ceil(BLOCK_BITS) * BLOCK_BITS
    }

    /// Bytes needed to build an index up to `x`.
    pub fn estimated_bytes(&self, x: u64) -> u64 {
        let bits = x + 1;
        let words = bits.div_ceil(64);
        let blocks = bits.div_ceil(BLOCK_BITS) + 1;
        let workers = if self.threads == 0 { crate::parallel::default_threads() } else { self.threads } as u64;
        let seg = self.segment().min(bits.div_ceil(BLOCK_BITS) * BLOCK_BITS);
        words * 8 + blocks * 8 + workers * seg * 8
    }
}

/// Bitset over `0..=x` with bit `n` set iff `n ≥ 1` and `P(n) ≤ y`, plus
/// running counts at every [`BLOCK_BITS`] boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothIndex {
    x: u64,
    y: u64,
    words: Vec<u64>,
    block_counts: Vec<u64>,
}

/// Builds the index for `n ≤ x`, `P(n) ≤ y` with default settings.
pub fn build_smooth_index(x: u64, y: u64) -> Result<SmoothIndex> {
    SmoothIndex::build(x, y, &SieveConfig::default())
}

impl SmoothIndex {
    pub fn build(x: u64, y: u64, cfg: &SieveConfig) -> Result<Self> {
        if y < 2 {
            return Err(Error::InvalidArgument(format!("y = {y} must be at least 2")));
        }
        if x < 1 {
            return Err(Error::InvalidArgument("x must be at least 1".into()));
        }
        if x >= 1 << 63 {
            return Err(Error::InvalidArgument("x must be below 2^63".into()));
        }
        let required = cfg.estimated_bytes(x);
        if required > cfg.memory_budget {
            return Err(Error::MemoryBudget { required, budget: cfg.memory_budget });
        }
        let bound = y.min(isqrt(x));
        let primes = primes_up_to(bound);
        let seg = cfg.segment();
        let n_bits = x + 1;
        let n_seg = n_bits.div_ceil(seg) as usize;
        let parts = map_blocks(n_seg, cfg.threads, |i| {
            let lo = i as u64 * seg;
            let hi = (lo + seg).min(n_bits);
            smooth_words(lo, hi, y, primes.primes())
        });
        let mut words = Vec::with_capacity(n_bits.div_ceil(64) as usize);
        for p in parts {
            words.extend_from_slice(&p);
        }
        let n_blocks = words.len().div_ceil(BLOCK_WORDS);
        let mut block_counts = Vec::with_capacity(n_blocks + 1);
        let mut acc = 0u64;
        block_counts.push(0);
        for chunk in words.chunks(BLOCK_WORDS) {
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            block_counts.push(acc);
        }
        Ok(Self { x, y, words, block_counts })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    /// Whether `n` is `y`-friable; `n` must be at most `x`.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        debug_assert!(n <= self.x);
        (self.words[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }

    /// `#{1 ≤ n ≤ t : P(n) ≤ y}` for `t ≤ x`.
    pub fn count(&self, t: u64) -> u64 {
        assert!(t <= self.x, "count({t}) beyond index bound {}", self.x);
        let block = (t / BLOCK_BITS) as usize;
        let first = block * BLOCK_WORDS;
        let last = (t >> 6) as usize;
        let mut c = self.block_counts[block];
        for w in &self.words[first..last] {
            c += w.count_ones() as u64;
        }
        let rem = t & 63;
        let mask = if rem == 63 { u64::MAX } else { (1u64 << (rem + 1)) - 1 };
        c + (self.words[last] & mask).count_ones() as u64
    }

    /// Total number of friable integers in the index, `Ψ(x, y)`.
    pub fn total(&self) -> u64 {
        *self.block_counts.last().unwrap_or(&0)
    }

    /// Calls `f(n)` for each friable `n` with `lo ≤ n ≤ hi` (clamped to `x`), ascending.
    pub fn for_each_in(&self, lo: u64, hi: u64, mut f: impl FnMut(u64)) {
        let hi = hi.min(self.x);
        if lo > hi {
            return;
        }
        for wi in (lo >> 6) as usize..=(hi >> 6) as usize {
            let mut w = self.words[wi];
            while w != 0 {
                let n = (wi as u64) * 64 + w.trailing_zeros() as u64;
                w &= w - 1;
                if n >= lo && n <= hi {
                    f(n);
                }
            }
        }
    }

    /// The raw bit words, for fingerprinting.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Heap bytes held by the index.
    pub fn heap_bytes(&self) -> usize {
        (self.words.len() + self.block_counts.len()) * 8
    }
}

/// Smoothness bits for `[lo, hi)`, where `lo` is a multiple of 64. The
/// multiplicative accumulator collects the part of `n` supported on
/// `primes` (all primes up to `min(y, √x)`); whatever is left is `1`, a
/// single prime above `√x`, or something divisible by a prime above `y`.
fn smooth_words(lo: u64, hi: u64, y: u64, primes: &[u64]) -> Vec<u64> {
    let w = (hi - lo) as usize;
    let mut acc = vec![1u64; w];
    for &p in primes {
        let mut pk = p;
        loop {
            let mut m = lo.max(1).div_ceil(pk) * pk;
            while m < hi {
                acc[(m - lo) as usize] *= p;
                m += pk;
            }
            match pk.checked_mul(p) {
                Some(next) if next < hi => pk = next,
                _ => break,
            }
        }
    }
    let mut words = vec![0u64; w.div_ceil(64)];
    for (i, &a) in acc.iter().enumerate() {
        let n = lo + i as u64;
        if n >= 1 && n / a <= y {
            words[i >> 6] |= 1 << (i & 63);
        }
    }
    words
}
