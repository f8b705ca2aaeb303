//! Dickman's function and its companions.
//!
//! On each unit interval `[k−1, k]` we write `ρ(k − ξ) = Σ cᵢ ξⁱ`
//! (`0 ≤ ξ ≤ 1`). The delay equation `uρ'(u) = −ρ(u−1)` gives every
//! coefficient but the constant one from the previous interval, and the
//! integral form `uρ(u) = ∫_{u−1}^{u} ρ(t) dt` pins the constant:
//! `c₀ = Σ_{i≥1} cᵢ / ((i+1)(k−1))`. Fixing `c₀` by continuity instead
//! lets a spurious `1/u` solution creep in, which swamps `ρ` long before
//! `u = 50`. The series for interval `k` has radius of convergence
//! `k ≥ 2`, so [`TERMS`] coefficients give full double precision.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write as _;

use num_complex::Complex64;

use crate::math::{ComplexSum, GaussLegendre, EULER_GAMMA};
use crate::{Error, Result};

/// Series length per unit interval.
pub const TERMS: usize = 72;

type Coeffs = [f64; TERMS];

fn first_interval() -> Coeffs {
    let mut c = [0.0; TERMS];
    c[0] = 1.0;
    c
}

/// Coefficients on `[k−1, k]` from those on `[k−2, k−1]`, `k ≥ 2`.
fn next_interval(prev: &Coeffs, k: usize) -> Coeffs {
    let kf = k as f64;
    let mut c = [0.0; TERMS];
    for i in 0..TERMS - 1 {
        c[i + 1] = (prev[i] + i as f64 * c[i]) / (kf * (i + 1) as f64);
    }
    let mut s = 0.0;
    for i in (1..TERMS).rev() {
        s += c[i] / (i + 1) as f64;
    }
    c[0] = s / (kf - 1.0);
    c
}

fn horner(c: &Coeffs, xi: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * xi + ci)
}

/// Interval number `k = ⌈u⌉` and local variable `ξ = k − u`.
fn locate(u: f64) -> (usize, f64) {
    let k = libm::ceil(u).max(1.0);
    (k as usize, k - u)
}

/// Below this the interval series is renormalised and the factor moved
/// into a log scale; `ρ` itself underflows near `u ≈ 140`.
const RESCALE_BELOW: f64 = 1e-150;

/// Series on one unit interval, `ρ = e^{log_scale} · Σ cᵢ ξⁱ`.
#[derive(Debug, Clone, Copy)]
struct Interval {
    c: Coeffs,
    log_scale: f64,
}

impl Interval {
    fn first() -> Self {
        Interval { c: first_interval(), log_scale: 0.0 }
    }

    fn next(&self, k: usize) -> Self {
        let mut c = next_interval(&self.c, k);
        let mut log_scale = self.log_scale;
        if c[0] < RESCALE_BELOW {
            let n = c[0];
            for ci in c.iter_mut() {
                *ci /= n;
            }
            log_scale += libm::log(n);
        }
        Interval { c, log_scale }
    }

    fn value(&self, xi: f64) -> f64 {
        let v = horner(&self.c, xi);
        if self.log_scale == 0.0 {
            v
        } else {
            v * libm::exp(self.log_scale)
        }
    }

    fn log_value(&self, xi: f64) -> f64 {
        self.log_scale + libm::log(horner(&self.c, xi))
    }
}

fn interval_for(k: usize) -> Interval {
    let mut c = Interval::first();
    for j in 2..=k {
        c = c.next(j);
    }
    c
}

/// Dickman's `ρ(u)`: `0` for `u ≤ 0`, `1` on `(0, 1]`.
///
/// Rebuilds the series up to `⌈u⌉` on each call; for repeated evaluation
/// use a [`DickmanTable`].
pub fn rho(u: f64) -> f64 {
    if u.is_nan() {
        return f64::NAN;
    }
    if u <= 0.0 {
        return 0.0;
    }
    if u <= 1.0 {
        return 1.0;
    }
    let (k, xi) = locate(u);
    interval_for(k).value(xi)
}

/// What [`DickmanTable::rho`] does past `u_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutOfRange {
    Error,
    /// Continue the series recurrence on the fly (nothing is cached).
    Extend,
}

/// `ρ` on `[0, u_max]`: per-interval series plus samples on a grid of
/// step `1/256` for local interpolation.
#[derive(Debug, Clone)]
pub struct DickmanTable {
    u_max: f64,
    intervals: Vec<Interval>,
    values: Vec<f64>,
    interp_error: f64,
    policy: OutOfRange,
}

impl DickmanTable {
    pub const STEPS_PER_UNIT: usize = 256;
    /// Degree of the interpolating polynomial.
    pub const INTERP_ORDER: usize = 8;

    pub fn new(u_max: f64) -> Self {
        Self::with_policy(u_max, OutOfRange::Error)
    }

    pub fn with_policy(u_max: f64, policy: OutOfRange) -> Self {
        assert!(u_max >= 1.0 && u_max.is_finite(), "u_max must be a finite value >= 1");
        let k_max = libm::ceil(u_max) as usize;
        let mut intervals = Vec::with_capacity(k_max);
        intervals.push(Interval::first());
        for k in 2..=k_max {
            let c = intervals[k - 2].next(k);
            intervals.push(c);
        }
        let n = k_max * Self::STEPS_PER_UNIT;
        let step = Self::step();
        let mut values = vec![1.0; n + 1];
        for (i, v) in values.iter_mut().enumerate().skip(Self::STEPS_PER_UNIT + 1) {
            let (k, xi) = locate(i as f64 * step);
            *v = intervals[k - 1].value(xi);
        }
        let mut t = Self { u_max, intervals, values, interp_error: 0.0, policy };
        // measured interpolation error, relative, at off-grid points
        let mut err: f64 = 0.0;
        for k in 2..=k_max {
            for j in 0..32 {
                let u = (k - 1) as f64 + (j as f64 + 0.37) / 32.0;
                if u > u_max {
                    break;
                }
                let exact = t.series(u);
                if exact < f64::MIN_POSITIVE {
                    break;
                }
                err = err.max(((t.interpolate_unchecked(u) - exact) / exact).abs());
            }
        }
        t.interp_error = err;
        t
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn step() -> f64 {
        1.0 / Self::STEPS_PER_UNIT as f64
    }

    /// Grid samples `ρ(i · step)`, `i = 0, 1, …` (with `ρ(0) := 1`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest relative interpolation error observed when the table was built.
    pub fn interp_error(&self) -> f64 {
        self.interp_error
    }

    /// The interval containing `u > 1`, extended on the fly past the table.
    fn interval(&self, u: f64) -> (Interval, f64) {
        let (k, xi) = locate(u);
        if k <= self.intervals.len() {
            return (self.intervals[k - 1], xi);
        }
        let mut c = *self.intervals.last().expect("at least one interval");
        for j in self.intervals.len() + 1..=k {
            c = c.next(j);
        }
        (c, xi)
    }

    fn series(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u <= 1.0 {
            return 1.0;
        }
        let (c, xi) = self.interval(u);
        c.value(xi)
    }

    fn log_series(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if u <= 1.0 {
            return 0.0;
        }
        let (c, xi) = self.interval(u);
        c.log_value(xi)
    }

    /// `ρ(u)` from the stored series.
    pub fn rho(&self, u: f64) -> Result<f64> {
        if u > self.u_max && self.policy == OutOfRange::Error {
            return Err(Error::InvalidArgument(format!("u = {u} beyond table limit {}", self.u_max)));
        }
        Ok(self.series(u))
    }

    /// `log ρ(u)`, finite well past the point where `ρ` underflows.
    pub fn log_rho(&self, u: f64) -> Result<f64> {
        if u > self.u_max && self.policy == OutOfRange::Error {
            return Err(Error::InvalidArgument(format!("u = {u} beyond table limit {}", self.u_max)));
        }
        Ok(self.log_series(u))
    }

    /// `e^{shift} ρ(u)` for `u` in the table, without underflow in between.
    fn shifted(&self, u: f64, shift: f64) -> f64 {
        if u <= 1.0 {
            return if u <= 0.0 { 0.0 } else { libm::exp(shift) };
        }
        let (c, xi) = self.interval(u);
        horner(&c.c, xi) * libm::exp(c.log_scale + shift)
    }

    /// `ρ(u)` by Lagrange interpolation of [`INTERP_ORDER`](Self::INTERP_ORDER)
    /// on grid points of the unit interval containing `u`.
    pub fn interpolate(&self, u: f64) -> Result<f64> {
        if u > self.u_max {
            return Err(Error::InvalidArgument(format!("u = {u} beyond table limit {}", self.u_max)));
        }
        Ok(self.interpolate_unchecked(u))
    }

    fn interpolate_unchecked(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u <= 1.0 {
            return 1.0;
        }
        let m = Self::STEPS_PER_UNIT;
        let p = Self::INTERP_ORDER;
        let pos = u * m as f64;
        let k = locate(u).0;
        let lo_i = (k - 1) * m;
        let hi_i = k * m;
        let centre = libm::floor(pos) as usize;
        let start = centre.saturating_sub(p / 2).clamp(lo_i, hi_i - p);
        let mut s = 0.0;
        for j in start..=start + p {
            let mut l = 1.0;
            for i in start..=start + p {
                if i != j {
                    l *= (pos - i as f64) / (j as f64 - i as f64);
                }
            }
            s += l * self.values[j];
        }
        s
    }
}

/// `ξ(u)`: the nonzero real root of `e^ξ = 1 + uξ`, with `ξ(1) = 0`.
pub fn xi(u: f64) -> f64 {
    assert!(u > 0.0, "xi(u) needs u > 0");
    if u == 1.0 {
        return 0.0;
    }
    // g(t) = (e^t − 1)/t − u is increasing, with g(0) = 1 − u
    let g = |t: f64| if t == 0.0 { 1.0 - u } else { libm::expm1(t) / t - u };
    let (mut lo, mut hi) = if u > 1.0 {
        let mut hi: f64 = 1.0;
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        (0.0, hi)
    } else {
        (-1.0 / u, 0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..50 {
        let e = libm::exp(t);
        let f = e - 1.0 - u * t;
        let step = f / (e - u);
        let next = (t - step).clamp(lo, hi);
        if (next - t).abs() <= 1e-16 * t.abs() {
            t = next;
            break;
        }
        t = next;
    }
    t
}

/// `ξ'(u) = ξ / (1 + uξ − u)`, with the limit `2` at `u = 1`.
pub fn xi_prime(u: f64) -> f64 {
    let x = xi(u);
    if x == 0.0 {
        return 2.0;
    }
    x / (1.0 + u * x - u)
}

/// `I(z) = ∫₀ᶻ (eᵗ − 1)/t dt = Σ_{n≥1} zⁿ/(n·n!)`.
///
/// The series loses about `|z| − Re z` nats to cancellation, so beyond ten
/// nats we switch to `I(z) = −E₁(−z) − log(−z) − γ`.
pub fn big_i(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if z.norm() - z.re <= 10.0 {
        big_i_series(z)
    } else {
        let w = -z;
        -e1(w) - w.ln() - EULER_GAMMA
    }
}

fn big_i_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = ComplexSum::new();
    let r = z.norm();
    for n in 1..5000 {
        term = term * z / n as f64;
        let t = term / n as f64;
        sum.add(t);
        if n as f64 > r && t.norm() <= 1e-18 * sum.value().norm() {
            break;
        }
    }
    sum.value()
}

/// Exponential integral `E₁(w)` by its continued fraction (modified Lentz),
/// for `w` away from the negative real axis.
fn e1(w: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    // E1(w) = e^{-w} / (w + 1 − 1²/(w + 3 − 2²/(w + 5 − …)))
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = one / (d * an + b);
        c = b + c.inv() * an;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-w).exp()
}

/// Laplace transform `ρ̂(s) = ∫₀^∞ e^{−st} ρ(t) dt = exp(γ + I(−s))`.
pub fn rho_hat(s: Complex64) -> Complex64 {
    log_rho_hat(s).exp()
}

/// `log ρ̂(s) = γ + I(−s)`; finite where `ρ̂` overflows (`Re s ≲ −8`).
pub fn log_rho_hat(s: Complex64) -> Complex64 {
    big_i(-s) + EULER_GAMMA
}

const QUAD_NODES: usize = 16;

/// Where `e^{−σt} ρ(t)` peaks: `ξ(t) = −σ`, or `0` for `σ ≥ 0`.
fn laplace_peak(sigma: f64) -> f64 {
    if sigma >= 0.0 {
        0.0
    } else {
        libm::expm1(-sigma) / -sigma
    }
}

/// The Laplace integral as `(J, m)` with `ρ̂(s) = e^m J`, `m` the log of
/// the integrand's peak modulus.
fn laplace_quadrature(s: Complex64, table: &DickmanTable) -> Result<(Complex64, f64)> {
    let peak = laplace_peak(s.re);
    let limit = libm::floor(table.u_max()) as usize;
    if peak + 2.0 > limit as f64 {
        return Err(Error::Quadrature {
            what: "rho_hat",
            estimate: f64::NAN,
            diagnostics: format!("s = {s}: the integrand peaks at t = {peak:.1}, past u_max = {}", table.u_max()),
        });
    }
    // ρ = 1 on (0, 1]
    let m = -s.re * peak + if peak <= 1.0 { 0.0 } else { table.log_series(peak) };
    let f = |t: f64| Complex64::from_polar(table.shifted(t, -s.re * t - m), -s.im * t);
    let gl = GaussLegendre::new(QUAD_NODES);
    let unit = |k: usize, panels: usize| {
        let mut acc = ComplexSum::new();
        let h = 1.0 / panels as f64;
        for j in 0..panels {
            let a = k as f64 + j as f64 * h;
            acc.add(gl.integrate_complex(a, a + h, f));
        }
        acc.value()
    };
    let mut coarse = ComplexSum::new();
    let mut fine = ComplexSum::new();
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        if k >= limit {
            return Err(Error::Quadrature {
                what: "rho_hat",
                estimate: f64::NAN,
                diagnostics: format!("s = {s}: integrand not negligible before u_max = {}", table.u_max()),
            });
        }
        let c = unit(k, 8);
        let f = unit(k, 16);
        coarse.add(c);
        fine.add(f);
        k += 1;
        if k >= 2 && k as f64 > peak + 1.0 && f.norm() <= 1e-18 * fine.value().norm() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let (c, f) = (coarse.value(), fine.value());
    let est = (c - f).norm() / f.norm();
    if !(est <= 1e-11) {
        let mut diag = String::new();
        let _ = writeln!(diag, "s = {s}, T = {k}, log scale = {m}, coarse = {c}, fine = {f}");
        return Err(Error::Quadrature { what: "rho_hat", estimate: est, diagnostics: diag });
    }
    Ok((f, m))
}

/// `ρ̂(s)` by direct Gauss–Legendre quadrature of the Laplace integral over
/// the table, with panels of width `1/8` checked against width `1/16`.
/// The integral is extended one unit at a time, past the peak of the
/// integrand, until the last unit adds less than `10⁻¹⁸` of the total.
///
/// For `Re s < 0` the table must reach beyond `(e^{−Re s} − 1)/(−Re s)`.
/// Far from the real axis the integral cancels by about
/// `ρ̂(Re s)/|ρ̂(s)|`, which bounds the attainable relative accuracy.
pub fn rho_hat_quadrature(s: Complex64, table: &DickmanTable) -> Result<Complex64> {
    let (j, m) = laplace_quadrature(s, table)?;
    Ok(j * libm::exp(m))
}

/// `log ρ̂(s)` by the same quadrature, for `s` where `ρ̂` overflows.
/// The imaginary part is reduced to `(−π, π]`.
pub fn log_rho_hat_quadrature(s: Complex64, table: &DickmanTable) -> Result<Complex64> {
    let (j, m) = laplace_quadrature(s, table)?;
    Ok(j.ln() + m)
}

/// `√(ξ'/2π) · exp(γ − uξ + I(ξ))` with `ξ = ξ(u)`, meaningful for `u ≥ 1`.
pub fn rho_asymptotic(u: f64) -> f64 {
    let x = xi(u);
    let i = big_i(Complex64::new(x, 0.0)).re;
    libm::sqrt(xi_prime(u) / (2.0 * PI)) * libm::exp(EULER_GAMMA - u * x + i)
}

/// `H(u) = exp{u / (log(u+1))²}`.
pub fn h_gauge(u: f64) -> f64 {
    let l = libm::log1p(u);
    libm::exp(u / (l * l))
}

/// `L_ε(y) = exp{(log y)^{3/5 − ε}}`.
pub fn l_gauge(epsilon: f64, y: f64) -> f64 {
    libm::exp(libm::pow(libm::log(y), 0.6 - epsilon))
}

/// `Y_ε = exp{(log y)^{3/2 − ε}}`.
pub fn y_gauge(epsilon: f64, y: f64) -> f64 {
    libm::exp(libm::pow(libm::log(y), 1.5 - epsilon))
}

/// The three growth gauges for a fixed `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGauges {
    pub epsilon: f64,
}

impl DomainGauges {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    pub fn h(&self, u: f64) -> f64 {
        h_gauge(u)
    }

    pub fn l(&self, y: f64) -> f64 {
        l_gauge(self.epsilon, y)
    }

    pub fn y(&self, y: f64) -> f64 {
        y_gauge(self.epsilon, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 80-digit reference values
    const RHO_REF: &[(f64, f64)] = &[
        (1.5, 0.594534891891835618022),
        (2.5, 0.1303195618322507456114),
        (3.0, 0.04860838829113156690718),
        (3.7, 0.01017283781500573838796),
        (4.0, 0.004910925647760832352739),
        (5.0, 0.0003547247004560397298339),
        (7.25, 3.897723683911094692236e-7),
        (10.0, 2.770171837725958988758e-11),
        (15.0, 7.589908004298059504653e-20),
        (20.0, 2.461782828764918055892e-29),
        (30.0, 3.269044325081901105473e-50),
        (40.0, 6.825490851101253042122e-73),
        (50.0, 6.715334496680112313741e-97),
    ];

    #[test]
    fn rho_reference_values() {
        let t = DickmanTable::new(50.0);
        for &(u, want) in RHO_REF {
            assert!(rel(rho(u), want) < 1e-12, "rho({u}) = {}", rho(u));
            assert!(rel(t.rho(u).unwrap(), want) < 1e-12);
        }
        assert!((rho(2.0) - (1.0 - core::f64::consts::LN_2)).abs() < 1e-15);
        assert_eq!(rho(0.5), 1.0);
        assert_eq!(rho(1.0), 1.0);
        assert_eq!(rho(0.0), 0.0);
        assert_eq!(rho(-3.0), 0.0);
    }

    #[test]
    fn table_interpolation() {
        let t = DickmanTable::new(50.0);
        assert!(t.interp_error() < 1e-12, "{}", t.interp_error());
        for &(u, want) in RHO_REF {
            assert!(rel(t.interpolate(u).unwrap(), want) < 1e-12);
        }
        assert!(t.rho(51.0).is_err());
        let e = DickmanTable::with_policy(10.0, OutOfRange::Extend);
        assert!(rel(e.rho(20.0).unwrap(), 2.461782828764918055892e-29) < 1e-12);
    }

    #[test]
    fn xi_values() {
        assert!((xi(core::f64::consts::E - 1.0) - 1.0).abs() < 1e-14);
        assert!(rel(xi(2.0), 1.25643120862616967698274) < 1e-14);
        assert_eq!(xi(1.0), 0.0);
        assert!(xi(1.0 + 1e-9).abs() < 1e-8);
        assert!(xi(0.5) < 0.0);
        for u in [0.1, 0.5, 0.9, 1.1, 3.0, 50.0, 1000.0] {
            let x = xi(u);
            let resid = libm::exp(x) - 1.0 - u * x;
            assert!(resid.abs() <= 1e-12 * (1.0 + u * x.abs()), "u={u}");
        }
        assert!((xi_prime(1.0) - 2.0).abs() < 1e-15);
        let h = 1e-6;
        for u in [1.5, 4.0, 20.0] {
            let fd = (xi(u + h) - xi(u - h)) / (2.0 * h);
            assert!(rel(xi_prime(u), fd) < 1e-6);
        }
    }

    #[test]
    fn big_i_values() {
        assert_eq!(big_i(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        let i1 = big_i(Complex64::new(1.0, 0.0));
        assert!((i1.re - 1.31790215145440389486001).abs() < 1e-14 && i1.im == 0.0);
        // 40-digit references
        let refs = [
            ((2.0, 20.0), (-3.234802686603999388, 1.537223941363527625)),
            ((-9.0, 2.0), (-2.798534112353843636, 0.2186590891160126805)),
            ((-4.0, 8.0), (-2.766448928011419660, 1.106389433318089931)),
            ((0.0, 30.0), (-4.011445463845759380, 1.566756540030351111)),
            ((-30.0, 0.0), (-3.978413046563691258, 0.0)),
        ];
        for ((zr, zi), (wr, wi)) in refs {
            let got = big_i(Complex64::new(zr, zi));
            let want = Complex64::new(wr, wi);
            assert!((got - want).norm() < 1e-13 * want.norm(), "I({zr}+{zi}i) = {got}");
        }
        // both branches agree where each is accurate
        for z in [Complex64::new(-4.0, 2.0), Complex64::new(1.0, 9.0), Complex64::new(-2.0, -6.0)] {
            let w = -z;
            let a = big_i_series(z);
            let b = -e1(w) - w.ln() - EULER_GAMMA;
            assert!((a - b).norm() < 1e-11 * a.norm(), "{z}: {a} vs {b}");
        }
        // I(ξ)/u = 1 + 1/ξ + O(1/ξ²): the approach to 1 is slow but steady
        let ratio = |u: f64| big_i(Complex64::new(xi(u), 0.0)).re / u;
        let mut last = f64::INFINITY;
        for u in [10.0, 50.0, 200.0, 1000.0] {
            let d = ratio(u) - 1.0;
            assert!(d > 0.0 && d < last && d <= 1.5 / xi(u), "u={u}: {d}");
            last = d;
        }
        assert!(ratio(200.0) < 1.2);
    }

    #[test]
    fn rho_hat_two_routes() {
        let t = DickmanTable::new(60.0);
        let eg = libm::exp(EULER_GAMMA);
        assert!(rel(rho_hat(Complex64::new(0.0, 0.0)).re, 1.78107241799019798523650) < 1e-14);
        let q = rho_hat_quadrature(Complex64::new(0.0, 0.0), &t).unwrap();
        assert!((q.re - eg).abs() < 1e-8 * eg);
        for s in [Complex64::new(-2.0, 3.0), Complex64::new(1.0, -40.0), Complex64::new(10.0, 5.0)] {
            let a = rho_hat(s);
            let b = rho_hat_quadrature(s, &t).unwrap();
            assert!((a - b).norm() < 1e-8 * a.norm(), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn rho_hat_envelopes() {
        let s = 30.0;
        let v = rho_hat(Complex64::new(s, 0.0)).re;
        assert!((s * v - 1.0).abs() <= 1.0 / s);
        let u = 5.0;
        let x = xi(u);
        let val = rho_hat(Complex64::new(-x, PI)).norm();
        let env = libm::sqrt(u) * rho(u) * libm::exp(u * x) * libm::exp(-u * PI * PI / (2.0 * PI * PI));
        assert!(val <= env, "{val} vs {env}");
    }

    #[test]
    fn log_scale_far_out() {
        let t = DickmanTable::new(2100.0);
        // no rescaling happens while ρ is comfortably representable
        assert_eq!(t.rho(40.0).unwrap(), rho(40.0));
        assert_eq!(t.rho(300.0).unwrap(), 0.0);
        for u in [150.5, 500.3, 2000.7] {
            let h = 1e-4;
            let d = (t.log_rho(u + h).unwrap() - t.log_rho(u - h).unwrap()) / (2.0 * h);
            let want = -libm::exp(t.log_rho(u - 1.0).unwrap() - t.log_rho(u).unwrap()) / u;
            assert!((d - want).abs() <= 1e-6 * want.abs(), "u = {u}: {d} vs {want}");
            let x = xi(u);
            let log_asym = 0.5 * libm::log(xi_prime(u) / (2.0 * PI)) + EULER_GAMMA - u * x + big_i(Complex64::new(x, 0.0)).re;
            assert!((t.log_rho(u).unwrap() - log_asym).abs() <= 3.0 / u);
        }
        assert!(t.log_rho(2101.0).is_err());
    }

    #[test]
    fn rho_hat_far_left() {
        // ρ̂(−10) ≈ e^{2489} overflows; compare logarithms
        let t = DickmanTable::new(3000.0);
        for s in [Complex64::new(-10.0, 0.0), Complex64::new(-9.0, 0.02)] {
            let a = log_rho_hat(s);
            let b = log_rho_hat_quadrature(s, &t).unwrap();
            // the phase is only defined mod 2π
            let dphase = libm::remainder(a.im - b.im, 2.0 * PI);
            assert!((a.re - b.re).abs() < 1e-8 && dphase.abs() < 1e-8, "{s}: {a} vs {b}");
        }
        assert!(rho_hat(Complex64::new(-10.0, 0.0)).re.is_infinite());
        assert!(matches!(
            rho_hat_quadrature(Complex64::new(-10.0, 0.0), &DickmanTable::new(60.0)),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn asymptotic_formula() {
        assert!((rho_asymptotic(1.0) - 1.0).abs() <= 1.0);
        assert!(rel(rho_asymptotic(20.0), rho(20.0)) <= 1.0 / 20.0 * 1.1);
        assert!(rel(rho_asymptotic(50.0), rho(50.0)) <= 0.05);
    }

    #[test]
    fn gauges_exceed_one() {
        let g = DomainGauges::new(0.1);
        for y in [3.0, 100.0, 1e6] {
            assert!(g.l(y) > 1.0 && g.y(y) > 1.0);
        }
        // u/log(u+1)² dips until u ≈ 3.92, so H only increases from there on
        assert!(g.h(0.5) > 1.0 && g.h(2.0) > 1.0);
        assert!(g.h(5.0) > g.h(4.0) && g.h(40.0) > g.h(5.0));
    }
}
