//! Flags, the JSON config file, and their merge.
//!
//! A config file is a flat JSON object whose keys are flag names. It is
//! turned into `--key=value` tokens placed ahead of the real arguments, so
//! anything given on the command line wins.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use friable_core::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Parser, Debug, Clone)]
#[command(name = "friable", version, about = "Friable integers in arithmetic progressions", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Build the friable index up to x and report its size
    Sieve,
    /// Ψ(x, y) next to the saddle-point estimate; optional Ψ_q and progressions
    Psi,
    /// σ(x, y, M; a) exactly, with both main terms
    Sigma,
    /// The comparison table over a grid of M
    Verify,
    /// ρ(u) on a list of u
    Dickman,
    /// α(x, y) and the quantities built on it
    Saddle,
    /// The Euler products F_a, G_a, K_a, ψ₁, ψ₂, H₁ at one point
    Products,
    /// The truncated Perron integral I(x, y; M)
    Contour,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sieve => "sieve",
            Command::Psi => "psi",
            Command::Sigma => "sigma",
            Command::Verify => "verify",
            Command::Dickman => "dickman",
            Command::Saddle => "saddle",
            Command::Products => "products",
            Command::Contour => "contour",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Flat JSON object of flag values; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_parser = parse_real)]
    pub x: Option<f64>,
    #[arg(long, global = true, value_parser = parse_count)]
    pub y: Option<u64>,
    /// Shift (nonzero, may be negative)
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_int)]
    pub a: Option<i64>,
    /// Modulus for the progression counts of `psi`
    #[arg(long, global = true, value_parser = parse_count)]
    pub q: Option<u64>,
    #[arg(long, global = true, value_parser = parse_real)]
    pub m: Option<f64>,
    /// Comma-separated list of M
    #[arg(long = "m-grid", global = true, value_parser = parse_grid)]
    pub m_grid: Option<Grid>,
    /// Comma-separated list of u
    #[arg(long, global = true, value_parser = parse_grid)]
    pub u: Option<Grid>,
    /// Complex point such as 0.75+3i
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub s1: Option<Complex64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub s2: Option<Complex64>,
    /// Prime cutoff of the Euler products
    #[arg(long = "p-max", global = true, value_parser = parse_count)]
    pub p_max: Option<u64>,
    /// Tail tolerance of the Euler products
    #[arg(long, global = true, value_parser = parse_real)]
    pub tolerance: Option<f64>,
    #[arg(long = "segment-size", global = true, value_parser = parse_count)]
    pub segment_size: Option<u64>,

    /// Worker threads, 0 for all cores
    #[arg(long, global = true, env = "FRIABLE_THREADS", value_parser = parse_count)]
    pub threads: Option<u64>,
    #[arg(long, global = true, value_parser = parse_real)]
    pub epsilon: Option<f64>,
    /// Bytes allowed for the sieve index and prime tables
    #[arg(long = "memory-budget", global = true, value_parser = parse_count)]
    pub memory_budget: Option<u64>,

    /// Report file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to json for a `.json` output file, csv otherwise
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write runtime_ms as 0 so that reruns are byte-identical
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
    /// Where a numerical failure dumps its diagnostics
    #[arg(long, global = true)]
    pub diagnostics: Option<PathBuf>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Non-negative integers, also written as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v = parse_real(s)?;
    if v < 0.0 || v.fract() != 0.0 || v >= u64::MAX as f64 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}

fn parse_int(s: &str) -> Result<i64, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<i64>() {
        return Ok(n);
    }
    let v = parse_real(s)?;
    if v.fract() != 0.0 || v.abs() >= i64::MAX as f64 {
        return Err(format!("`{s}` is not an integer"));
    }
    Ok(v as i64)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let v = s.split(',').filter(|t| !t.trim().is_empty()).map(parse_real).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(Grid(v))
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let z: Complex64 = s.trim().replace(' ', "").parse().map_err(|_| format!("`{s}` is not a complex number like 0.5-2i"))?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Config file entries as flag tokens.
fn config_tokens(path: &Path, command: Command) -> Result<Vec<OsString>, CliError> {
    let bad = |msg: String| CliError::BadArgs(format!("config {}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(bad("expected a JSON object".into()));
    };
    let mut out = Vec::new();
    for (key, v) in map {
        let flag = key.replace('_', "-");
        match flag.as_str() {
            "command" => {
                if v.as_str() != Some(command.name()) {
                    return Err(bad(format!("command {v} does not match `{}`", command.name())));
                }
                continue;
            }
            "config" => return Err(bad("config files cannot include other config files".into())),
            _ => {}
        }
        let text = match v {
            Value::Null | Value::Bool(false) => continue,
            Value::Bool(true) => {
                out.push(OsString::from(format!("--{flag}")));
                continue;
            }
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .into_iter()
                    .map(|item| match item {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s),
                        other => Err(bad(format!("`{key}` holds {other}, expected numbers"))),
                    })
                    .collect::<Result<_, _>>()?;
                parts.join(",")
            }
            Value::Object(_) => return Err(bad(format!("`{key}` must not be an object"))),
        };
        out.push(OsString::from(format!("--{flag}={text}")));
    }
    Ok(out)
}

/// Parses the arguments and folds in `--config` if present.
pub fn parse<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let first = Cli::try_parse_from(&argv)?;
    let Some(path) = first.flags.config.clone() else {
        return Ok(first);
    };
    let mut merged = Vec::with_capacity(argv.len() + 8);
    merged.extend(argv.first().cloned());
    merged.extend(config_tokens(&path, first.command)?);
    merged.extend(argv.iter().skip(1).cloned());
    Ok(Cli::try_parse_from(merged)?)
}
