//! Resolved run configuration and the work behind each subcommand.

use std::path::PathBuf;
use std::time::Instant;

use friable_core::averages::{contour_i, u_a, verify_theorem, SigmaQuery, DEFAULT_EPSILON};
use friable_core::counts::{e_star, psi, psi_coprime, psi_progression, ProgressionQuery};
use friable_core::dickman::{rho_asymptotic, xi, DickmanTable};
use friable_core::math::largest_prime_factor;
use friable_core::products::{EulerProducts, ProductParams, Truncation, MIN_RE_S};
use friable_core::saddle::{alpha_vs_xi, ht_estimate, solve_alpha};
use friable_core::sieve::{primes_up_to, SieveConfig, SmoothIndex};
use friable_core::{Complex64, RationalSum};
use serde::Serialize;

use crate::args::{Cli, Command, Format};
use crate::report::{Cell, Table};
use crate::CliError;

/// Largest `u` accepted by `dickman`.
pub const MAX_U: f64 = 1e5;

/// Columns of the `verify` table. Frozen: plotting scripts depend on them.
pub const VERIFY_COLUMNS: [&str; 12] =
    ["x", "y", "M", "a", "sigma_brute", "main_term_rho", "main_term_psi", "ratio_rho", "ratio_psi", "alpha", "u", "runtime_ms"];

/// Everything a run needs, after defaults and validation. Serialized into
/// every report; keys match the flag names, so it can be fed back through
/// `--config`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "complex_text")]
    pub s1: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "complex_text")]
    pub s2: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub threads: u64,
    pub memory_budget: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub no_timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PathBuf>,
}

fn complex_text<S: serde::Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    match z {
        Some(z) => s.serialize_str(&format!("{}{:+}i", z.re, z.im)),
        None => s.serialize_none(),
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadArgs(msg.into())
}

/// Rough bytes for a prime table up to `limit`.
fn prime_table_bytes(limit: u64) -> u64 {
    let l = (limit as f64).max(3.0);
    (1.3 * l / l.ln()) as u64 * 8 + (l.sqrt() as u64) * 9
}

fn check_budget(what: &str, needed: u64, budget: u64) -> Result<(), CliError> {
    if needed > budget {
        return Err(CliError::Budget(format!("{what} needs about {needed} bytes, over the memory budget of {budget}")));
    }
    Ok(())
}

impl RunConfig {
    /// Applies defaults and checks every parameter. Nothing is computed.
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        use Command::*;
        let f = &cli.flags;
        let command = cli.command;
        let given: [(&str, bool); 13] = [
            ("x", f.x.is_some()),
            ("y", f.y.is_some()),
            ("a", f.a.is_some()),
            ("q", f.q.is_some()),
            ("m", f.m.is_some()),
            ("m-grid", f.m_grid.is_some()),
            ("u", f.u.is_some()),
            ("s1", f.s1.is_some()),
            ("s2", f.s2.is_some()),
            ("p-max", f.p_max.is_some()),
            ("tolerance", f.tolerance.is_some()),
            ("segment-size", f.segment_size.is_some()),
            ("epsilon", f.epsilon.is_some()),
        ];
        let (required, optional): (&[&str], &[&str]) = match command {
            Sieve => (&["x", "y"], &["segment-size"]),
            Psi => (&["x", "y"], &["a", "q", "segment-size"]),
            Sigma => (&["x", "y", "m", "a"], &["epsilon", "segment-size"]),
            Verify => (&["x", "y", "a", "m-grid"], &["epsilon", "segment-size"]),
            Dickman => (&["u"], &[]),
            Saddle => (&["x", "y"], &[]),
            Products => (&["s1", "s2", "a", "y"], &["p-max", "tolerance"]),
            Contour => (&["x", "y", "m"], &["epsilon"]),
        };
        for (name, set) in given {
            if set && !required.contains(&name) && !optional.contains(&name) {
                return Err(bad(format!("--{name} is not used by `{}`", command.name())));
            }
            if !set && required.contains(&name) {
                return Err(bad(format!("`{}` needs --{name}", command.name())));
            }
        }

        let sieves = matches!(command, Sieve | Psi | Sigma | Verify);
        let sieve_default = SieveConfig::default();
        let truncation = Truncation::default();
        let takes_epsilon = matches!(command, Sigma | Verify | Contour);
        let format = f.format.unwrap_or_else(|| match f.out.as_ref().and_then(|p| p.extension()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        });
        let cfg = RunConfig {
            command,
            x: f.x,
            y: f.y,
            a: f.a,
            q: f.q,
            m: f.m,
            m_grid: f.m_grid.clone().map(|g| g.0),
            u: f.u.clone().map(|g| g.0),
            s1: f.s1,
            s2: f.s2,
            p_max: if command == Products { Some(f.p_max.unwrap_or(truncation.p_max)) } else { None },
            tolerance: if command == Products { Some(f.tolerance.unwrap_or(truncation.tolerance)) } else { None },
            segment_size: if sieves { Some(f.segment_size.unwrap_or(sieve_default.segment_size)) } else { None },
            epsilon: if takes_epsilon { Some(f.epsilon.unwrap_or(DEFAULT_EPSILON)) } else { None },
            threads: f.threads.unwrap_or(0),
            memory_budget: f.memory_budget.unwrap_or(sieve_default.memory_budget),
            format,
            out: f.out.clone(),
            no_timing: f.no_timing,
            diagnostics: f.diagnostics.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn sieve_config(&self) -> SieveConfig {
        SieveConfig {
            segment_size: self.segment_size.unwrap_or(SieveConfig::default().segment_size),
            threads: self.threads as usize,
            memory_budget: self.memory_budget,
        }
    }

    fn index_limit(&self) -> u64 {
        self.x.map_or(0, |x| x.floor() as u64)
    }

    fn sigma_queries(&self) -> Vec<SigmaQuery> {
        let (x, y, a) = (self.x.unwrap(), self.y.unwrap(), self.a.unwrap());
        let grid = match (&self.m_grid, self.m) {
            (Some(g), _) => g.clone(),
            (None, Some(m)) => vec![m],
            _ => Vec::new(),
        };
        let eps = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        grid.into_iter()
            .map(|m| SigmaQuery::new(x, y, m, a).with_epsilon(eps).with_threads(self.threads as usize))
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        use Command::*;
        if self.threads > 4096 {
            return Err(bad(format!("--threads {} is unreasonable", self.threads)));
        }
        if let Some(x) = self.x {
            if !(x >= 1.0 && x < 1.8e19) {
                return Err(bad(format!("x must lie in [1, 1.8e19), got {x}")));
            }
        }
        if let Some(y) = self.y {
            if y < 2 {
                return Err(bad(format!("y must be at least 2, got {y}")));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 0.5) {
                return Err(bad(format!("epsilon must lie in (0, 1/2), got {e}")));
            }
        }
        if self.segment_size == Some(0) {
            return Err(bad("segment size must be positive"));
        }
        match self.command {
            Sieve => {}
            Psi | Saddle | Contour => {
                let (x, y) = (self.x.unwrap(), self.y.unwrap());
                if x < y as f64 {
                    return Err(bad(format!("`{}` needs x >= y, got x = {x}, y = {y}", self.command.name())));
                }
                if self.q == Some(0) {
                    return Err(bad("q must be positive"));
                }
                if self.a.is_some() && self.q.is_none() {
                    return Err(bad("--a needs --q for `psi`"));
                }
                if let Some(m) = self.m {
                    if !(m >= 1.0) {
                        return Err(bad(format!("M must be at least 1, got {m}")));
                    }
                }
            }
            Sigma | Verify => {
                let grid = self.m_grid.as_deref().unwrap_or(&[]);
                if self.command == Verify && grid.is_empty() {
                    return Err(bad("--m-grid is empty"));
                }
                for q in self.sigma_queries() {
                    q.validate().map_err(|e| bad(e.to_string()))?;
                    if !(u_a(q.x, q.y, q.a) > 0.0) {
                        return Err(bad(format!("|a| = {} must be below x = {}", q.a.unsigned_abs(), q.x)));
                    }
                }
            }
            Dickman => {
                for &u in self.u.as_deref().unwrap_or(&[]) {
                    if !(0.0..=MAX_U).contains(&u) {
                        return Err(bad(format!("u must lie in [0, {MAX_U}], got {u}")));
                    }
                }
            }
            Products => {
                let (s1, s2, a, y) = (self.s1.unwrap(), self.s2.unwrap(), self.a.unwrap(), self.y.unwrap());
                let (p_max, tol) = (self.p_max.unwrap(), self.tolerance.unwrap());
                if a == 0 {
                    return Err(bad("a must be nonzero"));
                }
                if !(s1.re > 0.0) {
                    return Err(bad(format!("Re s1 must be positive, got {s1}")));
                }
                if !(s2.re > MIN_RE_S) {
                    return Err(bad(format!("Re s2 must exceed {MIN_RE_S}, got {s2}")));
                }
                if !(tol > 0.0) {
                    return Err(bad(format!("tolerance must be positive, got {tol}")));
                }
                if y > p_max {
                    return Err(bad(format!("y = {y} exceeds the prime cutoff {p_max}")));
                }
                if largest_prime_factor(a.unsigned_abs()) > y {
                    return Err(bad(format!("the prime factors of |a| = {} must not exceed y = {y}", a.unsigned_abs())));
                }
            }
        }

        let budget = self.memory_budget;
        match self.command {
            Sieve | Psi | Sigma | Verify => {
                let y = self.y.unwrap();
                let bytes = self.sieve_config().estimated_bytes(self.index_limit()) + prime_table_bytes(y.min(self.index_limit()));
                check_budget("the friable index", bytes, budget)
            }
            Saddle | Contour => check_budget("the prime table", prime_table_bytes(self.y.unwrap()), budget),
            Products => check_budget("the prime table", prime_table_bytes(self.p_max.unwrap()), budget),
            Dickman => {
                let u_max = self.u.as_deref().unwrap_or(&[]).iter().fold(1.0f64, |m, &u| m.max(u)) + 1.0;
                let bytes = (u_max * DickmanTable::STEPS_PER_UNIT as f64 * 8.0 + u_max * 200.0) as u64;
                check_budget("the Dickman table", bytes, budget)
            }
        }
    }
}

fn elapsed_ms(cfg: &RunConfig, start: Instant) -> f64 {
    if cfg.no_timing {
        0.0
    } else {
        start.elapsed().as_secs_f64() * 1e3
    }
}

fn exact_text(r: &RationalSum) -> String {
    r.to_ratio().to_string()
}

fn build_index(cfg: &RunConfig) -> friable_core::Result<SmoothIndex> {
    SmoothIndex::build(cfg.index_limit(), cfg.y.unwrap(), &cfg.sieve_config())
}

fn sieve(cfg: &RunConfig) -> friable_core::Result<Table> {
    let start = Instant::now();
    let idx = build_index(cfg)?;
    let count = idx.count(idx.x());
    let mut t = Table::new(&["x", "y", "psi", "density", "index_bytes", "segment_size", "runtime_ms"]);
    t.push(vec![
        idx.x().into(),
        idx.y().into(),
        count.into(),
        (count as f64 / idx.x().max(1) as f64).into(),
        idx.heap_bytes().into(),
        cfg.segment_size.unwrap().into(),
        elapsed_ms(cfg, start).into(),
    ]);
    Ok(t)
}

fn psi_row(cfg: &RunConfig) -> friable_core::Result<Table> {
    let start = Instant::now();
    let (x, y) = (cfg.x.unwrap(), cfg.y.unwrap());
    let idx = build_index(cfg)?;
    let count = psi(x, y, &idx)?;
    let sd = solve_alpha(x, y, &primes_up_to(y))?;
    let ht = ht_estimate(&sd);
    let mut cols = vec!["x", "y", "u", "psi", "alpha", "ht_estimate", "ratio"];
    let mut row: Vec<Cell> =
        vec![x.into(), y.into(), sd.u.into(), count.into(), sd.alpha.into(), ht.into(), (ht / count as f64).into()];
    if let Some(q) = cfg.q {
        cols.extend(["q", "psi_q"]);
        row.extend([q.into(), psi_coprime(x, y, q, &idx)?.into()]);
        if let Some(a) = cfg.a {
            let pq = ProgressionQuery::new(x, y, a, q);
            let e = e_star(pq, &idx)?;
            cols.extend(["a", "psi_aq", "e_star", "e_star_exact"]);
            row.extend([a.into(), psi_progression(pq, &idx, false)?.into(), e.to_f64().into(), exact_text(&e).into()]);
        }
    }
    cols.push("runtime_ms");
    row.push(elapsed_ms(cfg, start).into());
    let mut t = Table::new(&cols);
    t.push(row);
    Ok(t)
}

fn dickman_table_for(u_max: f64) -> DickmanTable {
    DickmanTable::new(u_max.max(1.0) + 1.0)
}

/// Rows of `sigma` and `verify`; `full` adds the exact value and extras.
fn sigma_rows(cfg: &RunConfig, full: bool) -> friable_core::Result<Table> {
    let queries = cfg.sigma_queries();
    let idx = build_index(cfg)?;
    let u_max = queries.iter().map(|q| u_a(q.x, q.y, q.a)).fold(1.0, f64::max);
    let report = verify_theorem(&queries, &idx, &dickman_table_for(u_max))?;
    let mut cols = VERIFY_COLUMNS.to_vec();
    if full {
        cols.pop();
        cols.extend(["sigma", "psi_xa_y", "in_hypothesis", "runtime_ms"]);
    }
    let mut t = Table::new(&cols);
    for r in report.rows {
        let runtime = if cfg.no_timing { 0.0 } else { r.runtime_ms };
        let mut row: Vec<Cell> = vec![
            r.x.into(),
            r.y.into(),
            r.m.into(),
            r.a.into(),
            r.sigma_brute.into(),
            r.main_term_rho.into(),
            r.main_term_psi.into(),
            r.ratio_rho.into(),
            r.ratio_psi.into(),
            r.alpha.into(),
            r.u.into(),
        ];
        if full {
            row.extend([exact_text(&r.sigma).into(), r.psi_xa_y.into(), r.in_hypothesis.into()]);
        }
        row.push(runtime.into());
        t.push(row);
    }
    Ok(t)
}

fn dickman(cfg: &RunConfig) -> friable_core::Result<Table> {
    let us = cfg.u.as_deref().unwrap();
    let table = dickman_table_for(us.iter().copied().fold(1.0, f64::max));
    let mut t = Table::new(&["u", "rho", "log_rho", "rho_asymptotic", "xi"]);
    for &u in us {
        let (asym, x) = if u > 1.0 { (rho_asymptotic(u), xi(u)) } else { (f64::NAN, 0.0) };
        t.push(vec![u.into(), table.rho(u)?.into(), table.log_rho(u)?.into(), asym.into(), x.into()]);
    }
    Ok(t)
}

fn saddle(cfg: &RunConfig) -> friable_core::Result<Table> {
    let (x, y) = (cfg.x.unwrap(), cfg.y.unwrap());
    let sd = solve_alpha(x, y, &primes_up_to(y))?;
    let mut t = Table::new(&[
        "x",
        "y",
        "u",
        "alpha",
        "xi_u",
        "alpha_vs_xi",
        "sigma1",
        "sigma2",
        "log_zeta_alpha_y",
        "rankin_bound",
        "ht_estimate",
    ]);
    t.push(vec![
        x.into(),
        y.into(),
        sd.u.into(),
        sd.alpha.into(),
        sd.xi_u.into(),
        alpha_vs_xi(&sd).into(),
        sd.sigma1.into(),
        sd.sigma2.into(),
        sd.log_zeta_alpha_y.into(),
        sd.rankin_bound().into(),
        ht_estimate(&sd).into(),
    ]);
    Ok(t)
}

fn products(cfg: &RunConfig) -> friable_core::Result<Table> {
    let (s1, s2, a, y) = (cfg.s1.unwrap(), cfg.s2.unwrap(), cfg.a.unwrap(), cfg.y.unwrap());
    let ev = EulerProducts::new(Truncation { p_max: cfg.p_max.unwrap(), tolerance: cfg.tolerance.unwrap() })?;
    let g = ev.g_family(&ProductParams::new(s1, s2, a, y))?;
    let mut t = Table::new(&[
        "s1_re", "s1_im", "s2_re", "s2_im", "a", "y", "g_a_re", "g_a_im", "g_a_err", "f_a_re", "f_a_im", "f_a_err", "h_1_re",
        "h_1_im", "h_1_err", "k_a_re", "k_a_im", "psi_1_re", "psi_1_im", "psi_2_re", "psi_2_im", "max_residual",
    ]);
    t.push(vec![
        s1.re.into(),
        s1.im.into(),
        s2.re.into(),
        s2.im.into(),
        a.into(),
        y.into(),
        g.g_a.value.re.into(),
        g.g_a.value.im.into(),
        g.g_a.abs_error().into(),
        g.f.f_a.value.re.into(),
        g.f.f_a.value.im.into(),
        g.f.f_a.abs_error().into(),
        g.h_1.value.re.into(),
        g.h_1.value.im.into(),
        g.h_1.abs_error().into(),
        g.k_a.re.into(),
        g.k_a.im.into(),
        g.psi_1.re.into(),
        g.psi_1.im.into(),
        g.f.psi_2.re.into(),
        g.f.psi_2.im.into(),
        g.residuals.max().max(g.f.residual).into(),
    ]);
    Ok(t)
}

fn contour(cfg: &RunConfig) -> friable_core::Result<Table> {
    let (x, y, m, eps) = (cfg.x.unwrap(), cfg.y.unwrap(), cfg.m.unwrap(), cfg.epsilon.unwrap());
    let primes = primes_up_to(y);
    let sd = solve_alpha(x, y, &primes)?;
    let i = contour_i(x, y, m, eps, &sd, &primes)?;
    let rho_u = dickman_table_for(sd.u).rho(sd.u)?;
    let mut t = Table::new(&[
        "x",
        "y",
        "M",
        "epsilon",
        "alpha",
        "u",
        "height",
        "panels",
        "integral",
        "imag",
        "rho_u",
        "ratio",
        "doubling_change",
    ]);
    t.push(vec![
        x.into(),
        y.into(),
        m.into(),
        eps.into(),
        sd.alpha.into(),
        sd.u.into(),
        i.height.into(),
        i.panels.into(),
        i.value.into(),
        i.imag.into(),
        rho_u.into(),
        (i.value / rho_u).into(),
        i.doubling_change.into(),
    ]);
    Ok(t)
}

/// Runs a validated configuration.
pub fn execute(cfg: &RunConfig) -> friable_core::Result<Table> {
    match cfg.command {
        Command::Sieve => sieve(cfg),
        Command::Psi => psi_row(cfg),
        Command::Sigma => sigma_rows(cfg, true),
        Command::Verify => sigma_rows(cfg, false),
        Command::Dickman => dickman(cfg),
        Command::Saddle => saddle(cfg),
        Command::Products => products(cfg),
        Command::Contour => contour(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::parse;

    fn resolve(argv: &[&str]) -> Result<RunConfig, CliError> {
        RunConfig::resolve(&parse(argv.iter().copied())?)
    }

    #[test]
    fn required_and_foreign_flags() {
        assert!(matches!(resolve(&["friable", "psi", "--x", "1e4"]), Err(CliError::BadArgs(_))));
        assert!(matches!(resolve(&["friable", "dickman", "--u", "2", "--x", "5"]), Err(CliError::BadArgs(_))));
        let cfg = resolve(&["friable", "dickman", "--u", "2,3"]).unwrap();
        assert_eq!(cfg.u, Some(vec![2.0, 3.0]));
        assert_eq!(cfg.epsilon, None);
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = resolve(&["friable", "sigma", "--x", "1e4", "--y", "20", "--m", "5", "--a", "2"]).unwrap();
        assert_eq!(cfg.epsilon, Some(DEFAULT_EPSILON));
        assert_eq!(cfg.segment_size, Some(SieveConfig::default().segment_size));
        assert_eq!(cfg.format, Format::Csv);
        let cfg = resolve(&["friable", "saddle", "--x", "1e6", "--y", "100", "--out", "r.JSON"]).unwrap();
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn domain_checks_precede_work() {
        for argv in [
            &["friable", "sigma", "--x", "100", "--y", "20", "--m", "0.5", "--a", "2"][..],
            &["friable", "sigma", "--x", "100", "--y", "20", "--m", "5", "--a", "0"],
            &["friable", "sigma", "--x", "100", "--y", "20", "--m", "5", "--a", "200"],
            &["friable", "verify", "--x", "100", "--y", "20", "--m-grid", "5", "--a", "1", "--epsilon", "0.7"],
            &["friable", "products", "--s1", "-1", "--s2", "0", "--a", "1", "--y", "10"],
            &["friable", "products", "--s1", "1", "--s2", "0", "--a", "13", "--y", "10"],
            &["friable", "saddle", "--x", "10", "--y", "100"],
            &["friable", "psi", "--x", "1e4", "--y", "10", "--a", "1"],
            &["friable", "dickman", "--u=-1"],
        ] {
            assert!(matches!(resolve(argv), Err(CliError::BadArgs(_))), "{argv:?}");
        }
    }

    #[test]
    fn budget_is_checked_up_front() {
        let r = resolve(&["friable", "sieve", "--x", "1e12", "--y", "100", "--memory-budget", "1000000"]);
        assert!(matches!(r, Err(CliError::Budget(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = resolve(&["friable", "products", "--s1", "0.75+3i", "--s2", "-0.5i", "--a", "6", "--y", "50"]).unwrap();
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["command"], "products");
        assert_eq!(v["s1"], "0.75+3i");
        assert_eq!(v["s2"], "0-0.5i");
        assert!(v.get("x").is_none() && v.get("p-max").is_some());
    }

    #[test]
    fn dickman_rows() {
        let cfg = resolve(&["friable", "dickman", "--u", "0.5,2"]).unwrap();
        let t = execute(&cfg).unwrap();
        assert_eq!(t.rows[0][1], Cell::Float(1.0));
        let Cell::Float(r2) = t.rows[1][1] else { panic!() };
        assert!((r2 - (1.0 - 2f64.ln())).abs() < 1e-12);
    }
}
