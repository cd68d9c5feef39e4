//! Subcommands: run a driver, write its primary output and a metadata sidecar.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qmcis::lattice::format_vector;
use serde::Serialize;

use crate::cache::VectorCache;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::runner::{self, FourierRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Cbc,
    Estimate,
    Convergence,
    FourierCheck,
    Assumptions,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cbc => "cbc",
            Command::Estimate => "estimate",
            Command::Convergence => "convergence",
            Command::FourierCheck => "fourier-check",
            Command::Assumptions => "assumptions",
        }
    }

    fn configured_out(self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        let o = &cfg.output;
        match self {
            Command::Cbc => o.cbc.clone(),
            Command::Estimate => o.estimate.clone(),
            Command::Convergence => o.convergence.clone(),
            Command::FourierCheck => o.fourier_check.clone(),
            Command::Assumptions => o.assumptions.clone(),
        }
    }
}

/// Run metadata. Kept out of the primary outputs so those stay
/// byte-identical across runs.
#[derive(Debug, Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: String,
    seed: u64,
    cache_dir: Option<String>,
    started_unix_ms: u128,
    finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// `conv.csv` → `conv.fits.csv`
pub fn fits_path(out: &Path) -> PathBuf {
    out.with_extension("fits.csv")
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes)?;
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

/// Runs `cmd`; `out` overrides the configured output path, stdout otherwise.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out: Option<&Path>, cache: &VectorCache) -> Result<(), CliError> {
    let started = now_ms();
    let out = out.map(Path::to_path_buf).or_else(|| cmd.configured_out(cfg));
    let out = out.as_deref();
    let outcome = match cmd {
        Command::Cbc => cbc(cfg, out, cache),
        Command::Estimate => {
            let r = runner::run_estimate(cfg, cache)?;
            write_out(out, &json_bytes(&r)?)
        }
        Command::Convergence => convergence(cfg, out, cache),
        Command::FourierCheck => fourier_check(cfg, out),
        Command::Assumptions => {
            let r = runner::run_assumptions(cfg)?;
            write_out(out, &json_bytes(&r)?)
        }
    };
    if let Some(p) = out {
        if p.exists() {
            let meta = Metadata {
                command: cmd.name(),
                version: env!("CARGO_PKG_VERSION"),
                config_hash: cfg.hash()?,
                seed: cfg.seed,
                cache_dir: cache.dir().map(|d| d.display().to_string()),
                started_unix_ms: started,
                finished_unix_ms: now_ms(),
            };
            fs::write(metadata_path(p), json_bytes(&meta)?)?;
        }
    }
    outcome
}

fn cbc(cfg: &ExperimentConfig, out: Option<&Path>, cache: &VectorCache) -> Result<(), CliError> {
    let r = runner::run_cbc(cfg, cache)?;
    write_out(out, format_vector(&r.vector).as_bytes())?;
    let mut report = String::from("s,error_sq\n");
    for (s, e) in r.prefix_error_sq.iter().enumerate() {
        report.push_str(&format!("{},{e:e}\n", s + 1));
    }
    // with the vector on stdout the table goes to stderr
    if out.is_some() {
        io::stdout().lock().write_all(report.as_bytes())?;
    } else {
        io::stderr().lock().write_all(report.as_bytes())?;
    }
    Ok(())
}

fn convergence(cfg: &ExperimentConfig, out: Option<&Path>, cache: &VectorCache) -> Result<(), CliError> {
    let out = out.ok_or_else(|| {
        CliError::Config("convergence needs --out or [output] convergence (it writes two files)".into())
    })?;
    let r = runner::run_convergence(cfg, cache)?;
    write_out(Some(out), &csv_bytes(&r.rows)?)?;
    write_out(Some(&fits_path(out)), &csv_bytes(&r.fits)?)?;
    let failed = r.failed_cells();
    if failed > 0 {
        eprintln!("warning: {failed} of {} cells failed; see the status column", r.rows.len());
    }
    Ok(())
}

fn fourier_check(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let rows = runner::run_fourier_check(&cfg.scheme, cfg.fourier.h_max)?;
    write_out(out, &csv_bytes(&rows)?)?;
    let bad: Vec<&FourierRow> = rows.iter().filter(|r| !(r.ratio <= 1.0)).collect();
    if let Some(first) = bad.first() {
        return Err(CliError::Bound(format!(
            "{} of {} coefficients exceed the bound for {}; first at h = {} (ratio {:.4})",
            bad.len(),
            rows.len(),
            cfg.scheme.label(),
            first.h,
            first.ratio
        )));
    }
    Ok(())
}
