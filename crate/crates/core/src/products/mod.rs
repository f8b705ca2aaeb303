//! Dirichlet series and Euler products: complex `ζ`, `Φ₂(s; a)`, `g_m`,
//! the families `F_a, F₁, ψ₂` and `G_a, K_a, ψ₁, H₁`.
//!
//! All infinite products go through [`EulerProducts`], which owns the prime
//! table for the cutoff and attaches a certified tail bound to every value.

mod checks;
mod euler;
mod families;
mod zeta;

use num_complex::Complex64;

pub use checks::{psi1_bound_check, zeta_y_approx_check, Psi1Bounds};
pub use euler::{log_c_p, log_e_p, log_l_p, Certified, EulerProducts, Truncation, MIN_RE_S};
pub use families::{k_closed, k_sum, psi_1, psi_2, FFamily, GFamily, GResiduals};
pub use zeta::{complex_zeta, g_m};

/// A point `(s₁, s₂)` together with the shift `a` and smoothness bound `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParams {
    pub s1: Complex64,
    pub s2: Complex64,
    pub a: i64,
    pub y: u64,
}

impl ProductParams {
    pub fn new(s1: Complex64, s2: Complex64, a: i64, y: u64) -> Self {
        Self { s1, s2, a, y }
    }
}
