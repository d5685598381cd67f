//! Command-line front end for `posmap`.
//!
//! Exit codes: 0 analysis completed (whatever the verdicts), 1 I/O error,
//! 2 unreadable or malformed input, 3 `decompose` on a map that is not
//! positive, 4 solver did not converge, 5 sampler exhausted, 6 no face found.

pub mod commands;
pub mod mapfile;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use posmap::ToleranceConfig;

use mapfile::Encoding;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed map file: {0}")]
    Format(String),
    #[error("{0}")]
    Core(#[from] posmap::Error),
    #[error("invalid flag: {0}")]
    Flag(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(posmap::Error::SamplerExhausted(_)) => 5,
            CliError::Format(_) | CliError::Core(_) | CliError::Flag(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "posmap", version, about = "Positive maps from M2 into M(n+1): classification and CP + co-CP splitting")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct TolFlags {
    /// Tolerance override NAME=VALUE (hermitian, psd, pos, structural, face,
    /// witness, feas, inv); repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Cone slack accepted from the decomposition solver.
    #[arg(long)]
    pub feas_tol: Option<f64>,
}

impl TolFlags {
    pub fn config(&self) -> Result<ToleranceConfig, CliError> {
        let mut t = ToleranceConfig::default();
        for item in &self.tol {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Flag(format!("expected NAME=VALUE, got {item:?}")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| CliError::Flag(format!("{value:?} is not a number")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Flag(format!("tolerance {name} must be finite and non-negative")));
            }
            let slot = match name {
                "hermitian" => &mut t.hermitian_tol,
                "psd" => &mut t.psd_tol,
                "pos" => &mut t.pos_tol,
                "structural" => &mut t.structural_tol,
                "face" => &mut t.face_tol,
                "witness" => &mut t.witness_tol,
                "feas" => &mut t.feas_tol,
                "inv" => &mut t.inv_tol,
                _ => return Err(CliError::Flag(format!("unknown tolerance {name:?}"))),
            };
            *slot = v;
        }
        if let Some(f) = self.feas_tol {
            t.feas_tol = f;
        }
        Ok(t)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a map: block-positivity, CP, co-CP and structural margins.
    Check {
        path: PathBuf,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Split a positive map into CP and co-CP parts.
    Decompose {
        path: PathBuf,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        /// Map file whose Choi matrix is the starting point (default H/2).
        #[arg(long)]
        start: Option<PathBuf>,
        /// Output prefix; writes PREFIX.cp.json and PREFIX.ccp.json
        /// (default: the input path without extension).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Check a splitting read from files against the original map.
    Verify {
        path: PathBuf,
        cp: PathBuf,
        ccp: PathBuf,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Multi-start uniqueness probe over sampled maps.
    Probe {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Slack values for the face sampler (comma separated); without it,
        /// samples come from the boundary stratum.
        #[arg(long, value_delimiter = ',')]
        slack: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Sample a unital positive map in the canonical face.
    Random {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        slack: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Encoding::Images)]
        encoding: Encoding,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Move a map into the canonical face by unitary conjugation.
    Canonicalize {
        path: PathBuf,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        /// Output file for the conjugated map (default: PATH.canonical.json).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolFlags,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Outcome {
    commands::dispatch(cli).unwrap_or_else(|e| Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: e.exit_code(),
    })
}
