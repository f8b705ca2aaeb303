//! Exact accumulation of many rationals with small denominators.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::math::{gcd, CompensatedSum};

/// A sum `N + Σ r_d / d`, stored as an integer part plus one residue
/// `0 ≤ r_d < d` per distinct denominator.
///
/// Every operation is exact, so the value never depends on the order in
/// which terms were added. Conversion to a single reduced fraction is done
/// only on demand ([`to_ratio`](Self::to_ratio)); [`to_f64`](Self::to_f64)
/// rounds each residue separately and sums them with compensation.
#[derive(Debug, Clone, Default)]
pub struct RationalSum {
    int: i128,
    fracs: BTreeMap<u64, i128>,
}

impl RationalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_integer(n: i128) -> Self {
        Self { int: n, fracs: BTreeMap::new() }
    }

    pub fn add_int(&mut self, n: i128) {
        self.int += n;
    }

    /// Adds `num / den`.
    pub fn add_frac(&mut self, num: i128, den: u64) {
        assert!(den > 0, "zero denominator");
        if num == 0 {
            return;
        }
        let g = gcd((num.unsigned_abs() % den as u128) as u64, den);
        let (num, den) = (num / g as i128, den / g);
        let d = den as i128;
        self.int += num.div_euclid(d);
        let r = num.rem_euclid(d);
        if den == 1 || r == 0 {
            return;
        }
        let e = self.fracs.entry(den).or_insert(0);
        *e += r;
        if *e >= d {
            *e -= d;
            self.int += 1;
        }
        if *e == 0 {
            self.fracs.remove(&den);
        }
    }

    /// Integer part of the stored representation (not necessarily the floor
    /// of the value, which may exceed it by the residues).
    pub fn integer_part(&self) -> i128 {
        self.int
    }

    /// Number of distinct denominators currently held.
    pub fn denominators(&self) -> usize {
        self.fracs.len()
    }

    /// Exact value as a reduced fraction.
    pub fn to_ratio(&self) -> BigRational {
        let mut terms: Vec<BigRational> = self
            .fracs
            .iter()
            .map(|(&d, &r)| BigRational::new(BigInt::from(r), BigInt::from(d)))
            .collect();
        // balanced pairwise sum keeps intermediate denominators small
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a + b),
                    None => next.push(a),
                }
            }
            terms = next;
        }
        let frac = terms.pop().unwrap_or_else(BigRational::zero);
        frac + BigRational::from_integer(BigInt::from(self.int))
    }

    /// Nearest-ish `f64`: each residue `r/d ∈ [0,1)` is rounded once and the
    /// pieces are summed with Neumaier compensation.
    pub fn to_f64(&self) -> f64 {
        // every residue is carried as hi + lo, so the fractional total keeps
        // about twice the working precision before it meets the integer part
        let mut fr = CompensatedSum::new();
        for (&d, &r) in &self.fracs {
            let (r, d) = (r as f64, d as f64);
            let hi = r / d;
            fr.add(hi);
            fr.add(libm::fma(-hi, d, r) / d);
        }
        let (sum, c) = fr.parts();
        let whole = libm::floor(sum);
        let int = self.int + whole as i128;
        let mut s = CompensatedSum::new();
        s.add(int as f64);
        s.add(sum - whole);
        s.add(c);
        s.value()
    }

    /// Exact test; residues over different denominators may cancel.
    pub fn is_zero(&self) -> bool {
        if self.fracs.is_empty() {
            return self.int == 0;
        }
        self.to_ratio().is_zero()
    }
}

impl AddAssign<&RationalSum> for RationalSum {
    fn add_assign(&mut self, rhs: &RationalSum) {
        self.int += rhs.int;
        for (&d, &r) in &rhs.fracs {
            self.add_frac(r, d);
        }
    }
}

impl AddAssign for RationalSum {
    fn add_assign(&mut self, rhs: RationalSum) {
        *self += &rhs;
    }
}

impl SubAssign<&RationalSum> for RationalSum {
    fn sub_assign(&mut self, rhs: &RationalSum) {
        self.int -= rhs.int;
        for (&d, &r) in &rhs.fracs {
            self.add_frac(-r, d);
        }
    }
}

impl SubAssign for RationalSum {
    fn sub_assign(&mut self, rhs: RationalSum) {
        *self -= &rhs;
    }
}

impl Neg for RationalSum {
    type Output = RationalSum;
    fn neg(self) -> RationalSum {
        let mut out = RationalSum::from_integer(-self.int);
        for (d, r) in self.fracs {
            out.add_frac(-r, d);
        }
        out
    }
}

impl core::iter::Sum for RationalSum {
    fn sum<I: Iterator<Item = RationalSum>>(iter: I) -> Self {
        let mut acc = RationalSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl PartialEq for RationalSum {
    fn eq(&self, other: &Self) -> bool {
        (self.int == other.int && self.fracs == other.fracs) || self.to_ratio() == other.to_ratio()
    }
}

impl Eq for RationalSum {}

impl PartialOrd for RationalSum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalSum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_ratio().cmp(&other.to_ratio())
    }
}

impl From<i128> for RationalSum {
    fn from(n: i128) -> Self {
        Self::from_integer(n)
    }
}
