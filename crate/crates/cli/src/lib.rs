//! The `friable` command-line tool.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 memory budget exceeded,
//! 4 numerical failure (a diagnostic file is written), 1 anything else
//! (I/O).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub mod args;
pub mod commands;
pub mod report;

use commands::RunConfig;
use report::Header;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    BadArgs(String),
    #[error("{0}")]
    Budget(String),
    #[error("{message}")]
    Numerical { message: String, diagnostics: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::BadArgs(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Numerical { .. } => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<friable_core::Error> for CliError {
    fn from(e: friable_core::Error) -> Self {
        use friable_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::OutsideDomain(_) | E::IndexMismatch(_) | E::Pole(_) => CliError::BadArgs(e.to_string()),
            E::MemoryBudget { .. } => CliError::Budget(e.to_string()),
            E::Quadrature { ref diagnostics, .. } => {
                CliError::Numerical { diagnostics: diagnostics.clone(), message: e.to_string() }
            }
            _ => CliError::Numerical { message: e.to_string(), diagnostics: String::new() },
        }
    }
}

/// Where a numerical failure leaves its dump.
pub fn diagnostics_path(cfg: &RunConfig) -> PathBuf {
    if let Some(p) = &cfg.diagnostics {
        return p.clone();
    }
    match &cfg.out {
        Some(out) => {
            let mut s = out.clone().into_os_string();
            s.push(".diagnostics.txt");
            s.into()
        }
        None => PathBuf::from("friable-diagnostics.txt"),
    }
}

fn run_inner(argv: Vec<OsString>, stdout: &mut dyn Write) -> Result<(), (CliError, Option<RunConfig>)> {
    let cli = args::parse(argv).map_err(|e| (e, None))?;
    let cfg = RunConfig::resolve(&cli).map_err(|e| (e, None))?;
    if let Some(parent) = cfg.out.as_ref().and_then(|p| p.parent()).filter(|p| !p.as_os_str().is_empty()) {
        if !parent.is_dir() {
            let msg = format!("output directory {} does not exist", parent.display());
            return Err((CliError::BadArgs(msg), Some(cfg)));
        }
    }
    let config = serde_json::to_value(&cfg).expect("config serializes");
    let table = commands::execute(&cfg).map_err(|e| (CliError::from(e), Some(cfg.clone())))?;
    let header = Header::new(config);
    // render fully before touching the destination, so failures leave nothing behind
    let mut body = Vec::new();
    report::write_report(&mut body, cfg.format, &header, &table).map_err(|e| (e, Some(cfg.clone())))?;
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &body),
        None => stdout.write_all(&body),
    };
    written.map_err(|e| (CliError::Io(e), Some(cfg)))
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let Err((err, cfg)) = run_inner(argv, stdout) else {
        return 0;
    };
    match &err {
        CliError::Clap(e) => {
            let text = e.render().ansi().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
        }
        CliError::Numerical { message, diagnostics } => {
            let _ = writeln!(stderr, "error: {message}");
            if let Some(cfg) = cfg {
                let path = diagnostics_path(&cfg);
                let config = serde_json::to_value(&cfg).expect("config serializes");
                let dump = format!("{}error: {message}\n{diagnostics}", Header::new(config).comment_lines());
                match std::fs::write(&path, dump) {
                    Ok(()) => {
                        let _ = writeln!(stderr, "diagnostics written to {}", path.display());
                    }
                    Err(e) => {
                        let _ = writeln!(stderr, "could not write diagnostics to {}: {e}", path.display());
                    }
                }
            }
        }
        _ => {
            let _ = writeln!(stderr, "error: {err}");
        }
    }
    err.exit_code()
}
