//! The truncated Perron integral
//! `I(x, y; M) = (1/2πi) ∫_{α−iT}^{α+iT} ζ(s, y) x^{s−1} / (ζ(s)(s − 1)) ds`, `T = L_ε(M)`.

use alloc::format;
use alloc::string::String;
use core::fmt::Write as _;

use num_complex::Complex64;

use crate::dickman::l_gauge;
use crate::math::{ComplexSum, GaussLegendre};
use crate::products::complex_zeta;
use crate::saddle::{log_zeta_y, SaddleData};
use crate::sieve::PrimeTable;
use crate::{Error, Result};

const NODES: usize = 16;
/// Relative agreement required between the panel counts `n` and `2n`.
pub const DOUBLING_TOLERANCE: f64 = 1e-10;
/// Largest accepted `|Im I| / |I|`.
pub const IMAG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourIntegral {
    /// `Re I(x, y; M)`.
    pub value: f64,
    /// Imaginary part left over by the symmetric quadrature.
    pub imag: f64,
    /// Height `T = L_ε(M)`.
    pub height: f64,
    pub panels: usize,
    /// Relative change when the panel count is doubled.
    pub doubling_change: f64,
}

fn integrand(s: Complex64, log_x: f64, y: u64, primes: &PrimeTable) -> Result<Complex64> {
    let lz = log_zeta_y(s, y, primes)?;
    let one = Complex64::new(1.0, 0.0);
    let zeta = complex_zeta(s)?;
    Ok((lz + (s - one) * log_x).exp() / (zeta * (s - one)))
}

fn composite(a: f64, h: f64, panels: usize, gl: &GaussLegendre, f: &dyn Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    for i in 0..panels {
        let lo = a + h * i as f64;
        for (t, w) in gl.mapped(lo, lo + h) {
            acc.add(f(t)? * w);
        }
    }
    Ok(acc.value())
}

fn node_dump(x: f64, y: u64, alpha: f64, height: f64, panels: usize, f: &dyn Fn(f64) -> Result<Complex64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# x = {x:e}, y = {y}, alpha = {alpha:.17e}, T = {height:.17e}, panels = {panels}");
    let _ = writeln!(out, "tau,re,im");
    let n = 8 * panels.max(1);
    for i in 0..=n {
        let t = -height + 2.0 * height * i as f64 / n as f64;
        match f(t) {
            Ok(z) => {
                let _ = writeln!(out, "{t:.17e},{:.17e},{:.17e}", z.re, z.im);
            }
            Err(e) => {
                let _ = writeln!(out, "{t:.17e},error,{e}");
            }
        }
    }
    out
}

/// `I(x, y; M)` on the line `Re s = α(x, y)`, by composite 16-point
/// Gauss–Legendre with panels of width about `π/(2 log x)`, checked
/// against twice as many panels.
pub fn contour_i(x: f64, y: u64, m: f64, epsilon: f64, sd: &SaddleData, primes: &PrimeTable) -> Result<ContourIntegral> {
    if !(x > 1.0 && m >= 1.0 && epsilon > 0.0 && epsilon < 0.6) {
        return Err(Error::InvalidArgument(format!(
            "contour integral needs x > 1, M >= 1, 0 < epsilon < 0.6; got x = {x}, M = {m}, epsilon = {epsilon}"
        )));
    }
    if sd.y != y || !(sd.alpha > 0.0 && sd.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "saddle data (y = {}, alpha = {}) does not fit y = {y} with 0 < alpha < 1",
            sd.y, sd.alpha
        )));
    }
    primes.require(y)?;
    let log_x = libm::log(x);
    let height = l_gauge(epsilon, m);
    let alpha = sd.alpha;
    let f = |t: f64| integrand(Complex64::new(alpha, t), log_x, y, primes);
    let width = core::f64::consts::PI / (2.0 * log_x);
    let panels = libm::ceil(2.0 * height / width).max(2.0) as usize;
    let gl = GaussLegendre::new(NODES);
    let coarse = composite(-height, 2.0 * height / panels as f64, panels, &gl, &f)?;
    let fine = composite(-height, height / panels as f64, 2 * panels, &gl, &f)?;
    let scale = 1.0 / (2.0 * core::f64::consts::PI);
    let value = fine * scale;
    let doubling_change = (fine - coarse).norm() / fine.norm();
    let imag_ratio = value.im.abs() / value.norm();
    if !(doubling_change <= DOUBLING_TOLERANCE) || !(imag_ratio <= IMAG_TOLERANCE) {
        return Err(Error::Quadrature {
            what: "I(x, y; M)",
            estimate: doubling_change.max(imag_ratio),
            diagnostics: node_dump(x, y, alpha, height, panels, &f),
        });
    }
    Ok(ContourIntegral { value: value.re, imag: value.im, height, panels: 2 * panels, doubling_change })
}
