//! Friable (y-smooth) integers in arithmetic progressions of large modulus.
//!
//! The crate is split along the objects it computes:
//!
//! * [`sieve`]: prime tables, segmented factor sieves and the [`SmoothIndex`]
//!   bitset that answers `Ψ(t, y)` prefix queries.
//! * [`counts`]: exact counting functions `Ψ`, `Ψ_q`, `Ψ(x,y;a,q)`, `E*`
//!   and the Möbius sum `Φ_μ`.
//! * [`dickman`]: Dickman's `ρ`, `ξ(u)`, the entire function `I`, the
//!   Laplace transform `ρ̂` and the usual growth gauges.
//! * [`saddle`]: the saddle point `α(x, y)`, `ζ(s, y)` and the
//!   Hildebrand–Tenenbaum approximation.
//! * [`products`]: complex `ζ(s)`, `Φ₂`, and the Euler products
//!   `F_a`, `G_a`, `K_a`, `ψ₁`, `ψ₂`, `H₁`.
//! * [`averages`]: the averaged error `σ(x, y, M; a)`, its split pieces,
//!   the contour integral `I(x, y; M)` and comparison reports.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. The `parallel` feature enables rayon-backed block
//! reductions; results never depend on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod averages;
pub mod counts;
pub mod dickman;
mod error;
pub mod exact;
pub mod math;
pub mod parallel;
pub mod products;
pub mod saddle;
pub mod sieve;

pub use error::{Error, Result};
pub use exact::RationalSum;
pub use num_complex::Complex64;
pub use sieve::{FactorSegment, PrimeTable, SieveConfig, SmoothIndex};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
