//! Main terms and the comparison table.

use alloc::format;
use alloc::vec::Vec;


use super::sigma::sigma_brute;
use super::SigmaQuery;
use crate::counts::psi;
use crate::dickman::DickmanTable;
use crate::exact::RationalSum;
use crate::math::phi;
use crate::saddle::solve_alpha;
use crate::sieve::{primes_up_to, SmoothIndex};
use crate::{Error, Result};

/// `u_a = u − log|a|/log y`.
pub fn u_a(x: f64, y: u64, a: i64) -> f64 {
    let ly = libm::log(y as f64);
    (libm::log(x) - libm::log(a.unsigned_abs() as f64)) / ly
}

/// `−(x φ(|a|)/(2M|a|)) ρ(u_a)`.
pub fn main_term(query: &SigmaQuery, dickman: &DickmanTable) -> Result<f64> {
    query.validate()?;
    let SigmaQuery { x, y, m, a, .. } = *query;
    let ua = u_a(x, y, a);
    if !(ua > 0.0) {
        return Err(Error::InvalidArgument(format!("u_a = {ua} must be positive")));
    }
    let a_abs = a.unsigned_abs();
    let rho = dickman.rho(ua)?;
    Ok(-(x * phi(a_abs) as f64 / (2.0 * m * a_abs as f64)) * rho)
}

/// `−(φ(|a|)/(2M)) Ψ(x/|a|, y)`, with the exact count.
pub fn main_term_psi(query: &SigmaQuery, index: &SmoothIndex) -> Result<f64> {
    query.validate()?;
    let SigmaQuery { x, y, m, a, .. } = *query;
    let a_abs = a.unsigned_abs();
    let count = psi(x / a_abs as f64, y, index)?;
    Ok(-(phi(a_abs) as f64 / (2.0 * m)) * count as f64)
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaRow {
    pub x: f64,
    pub y: u64,
    pub m: f64,
    pub a: i64,
    pub sigma: RationalSum,
    pub sigma_brute: f64,
    pub main_term_rho: f64,
    pub main_term_psi: f64,
    pub ratio_rho: f64,
    pub ratio_psi: f64,
    /// `Ψ(x/|a|, y)`.
    pub psi_xa_y: u64,
    pub alpha: f64,
    pub u: f64,
    /// Whether `|a| ≤ M^{1/2−ε}`.
    pub in_hypothesis: bool,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    pub rows: Vec<SigmaRow>,
}

#[cfg(feature = "std")]
fn now() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(not(feature = "std"))]
fn now() -> Option<()> {
    None
}

#[cfg(feature = "std")]
fn elapsed_ms(t: Option<std::time::Instant>) -> f64 {
    t.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
}

#[cfg(not(feature = "std"))]
fn elapsed_ms(_: Option<()>) -> f64 {
    0.0
}

/// Evaluates `σ` against both main terms for every query; rows come back
/// sorted by `M` (stable for equal `M`). All queries must share `y` with
/// `index`, which must cover the largest `x`.
pub fn verify_theorem(grid: &[SigmaQuery], index: &SmoothIndex, dickman: &DickmanTable) -> Result<SigmaReport> {
    let mut grid: Vec<SigmaQuery> = grid.to_vec();
    grid.sort_by(|p, q| p.m.total_cmp(&q.m));
    let primes = primes_up_to(index.y());
    let mut rows = Vec::with_capacity(grid.len());
    for q in &grid {
        let start = now();
        let sigma = sigma_brute(q, index)?;
        let sigma_f = sigma.to_f64();
        let rho_term = main_term(q, dickman)?;
        let psi_term = main_term_psi(q, index)?;
        let a_abs = q.a.unsigned_abs();
        let psi_xa_y = psi(q.x / a_abs as f64, q.y, index)?;
        let sd = solve_alpha(q.x, q.y, &primes)?;
        rows.push(SigmaRow {
            x: q.x,
            y: q.y,
            m: q.m,
            a: q.a,
            sigma_brute: sigma_f,
            sigma,
            main_term_rho: rho_term,
            main_term_psi: psi_term,
            ratio_rho: sigma_f / rho_term,
            ratio_psi: sigma_f / psi_term,
            psi_xa_y,
            alpha: sd.alpha,
            u: sd.u,
            in_hypothesis: q.in_hypothesis(),
            runtime_ms: elapsed_ms(start),
        });
    }
    Ok(SigmaReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dickman::rho;
    use crate::sieve::build_smooth_index;

    #[test]
    fn main_term_shapes() {
        let table = DickmanTable::new(20.0);
        let q = SigmaQuery::new(1e6, 100, 100.0, 1);
        let u = 3.0;
        let want = -1e6 * rho(u) / 200.0;
        assert!((main_term(&q, &table).unwrap() - want).abs() < 1e-9 * want.abs());
        let q = SigmaQuery::new(1e6, 100, 100.0, -1);
        assert!((main_term(&q, &table).unwrap() - want).abs() < 1e-9 * want.abs());
        let q = SigmaQuery::new(1e6, 100, 100.0, 2);
        let ua = 3.0 - libm::log(2.0) / libm::log(100.0);
        let want = -(1e6 / (2.0 * 100.0 * 2.0)) * rho(ua);
        assert!((main_term(&q, &table).unwrap() - want).abs() < 1e-9 * want.abs());
        let q = SigmaQuery::new(50.0, 100, 10.0, 60);
        assert!(main_term(&q, &table).is_err());
    }

    #[test]
    fn everything_smooth_region() {
        let table = DickmanTable::new(20.0);
        let idx = build_smooth_index(1000, 2000).unwrap();
        let q = SigmaQuery::new(1000.0, 2000, 5.0, 3);
        let mt = main_term(&q, &table).unwrap();
        assert!((mt - (-1000.0 * 2.0 / 30.0)).abs() < 1e-12);
        let psi_mt = main_term_psi(&q, &idx).unwrap();
        assert_eq!(psi_mt, -(2.0 / 10.0) * 333.0);
    }

    #[test]
    fn report_rows_sorted_and_labelled() {
        let table = DickmanTable::new(20.0);
        let idx = build_smooth_index(100_000, 100).unwrap();
        let grid = [
            SigmaQuery::new(1e5, 100, 30.0, 1),
            SigmaQuery::new(1e5, 100, 10.0, 1),
            SigmaQuery::new(1e5, 100, 10.0, 5),
        ];
        let r = verify_theorem(&grid, &idx, &table).unwrap();
        let ms: Vec<f64> = r.rows.iter().map(|row| row.m).collect();
        assert_eq!(ms, [10.0, 10.0, 30.0]);
        assert!(r.rows[0].in_hypothesis && !r.rows[1].in_hypothesis);
        for row in &r.rows {
            assert!(row.main_term_rho < 0.0 && row.main_term_psi < 0.0);
            assert_eq!(row.ratio_psi, row.sigma_brute / row.main_term_psi);
        }
    }
}
