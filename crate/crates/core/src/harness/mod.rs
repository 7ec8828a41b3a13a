//! Configuration parsing, scenario dispatch and result persistence.
//!
//! Every run writes its tables as CSV (reals with 17 significant digits),
//! per-run outcomes as JSON lines, and a `manifest.json` holding the config
//! echo, resolved defaults, wall time and a SHA-256 checksum over the primary
//! outputs. The checksum covers file contents only, so identical configs give
//! identical checksums regardless of timing or worker count.

pub mod config;
pub mod output;
pub mod scenarios;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::ExponentError;
use crate::linear_propagator::PropagatorError;
use crate::phase_geometry::GeometryError;
use crate::semilinear_solver::SolverError;
use crate::special_functions::SpecialFnError;
use crate::strichartz_verifier::StrichartzError;

pub use config::{emit_config, parse_config, RunConfig, Scenario};
pub use output::{fmt_real, OutputFile, OutputSet};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 2 for anything the user can fix in the config, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse { .. } | Self::UnknownScenario(_) | Self::Validation(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}

impl From<ExponentError> for HarnessError {
    fn from(e: ExponentError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<GeometryError> for HarnessError {
    fn from(e: GeometryError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<SpecialFnError> for HarnessError {
    fn from(e: SpecialFnError) -> Self {
        match e {
            SpecialFnError::DegenerateM => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<PropagatorError> for HarnessError {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::Instability { .. } => Self::Numerical(e.to_string()),
            PropagatorError::Symbol(inner) => inner.into(),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for HarnessError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Propagator(inner) => inner.into(),
            SolverError::Exponent(inner) => inner.into(),
            SolverError::InvalidOption { .. } => Self::Validation(e.to_string()),
            SolverError::StepRejection { .. } | SolverError::PicardDivergence(_) => {
                Self::Numerical(e.to_string())
            }
        }
    }
}

impl From<StrichartzError> for HarnessError {
    fn from(e: StrichartzError) -> Self {
        match e {
            StrichartzError::Propagator(inner) => inner.into(),
            StrichartzError::Solver(inner) => inner.into(),
            StrichartzError::Exponent(inner) => inner.into(),
            StrichartzError::TailEnergy { .. } => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub config: RunConfig,
    /// Defaults filled in at run time and headline results.
    pub resolved: serde_json::Value,
    pub threads: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputFile>,
    pub checksum: String,
}

/// Runs the configured scenario and writes outputs plus `manifest.json`
/// into `config.output_dir`.
pub fn run_scenario(config: &RunConfig) -> Result<Manifest, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let mut out = OutputSet::create(&config.output_dir)?;
    let resolved = match config.scenario {
        Scenario::Exponents => scenarios::exponents(config, &mut out)?,
        Scenario::CheckGeometry => scenarios::check_geometry(config, &mut out)?,
        Scenario::Symbols => scenarios::symbols(config, &mut out)?,
        Scenario::SolveLinear => scenarios::solve_linear(config, &mut out)?,
        Scenario::SolveSemilinear => scenarios::solve_semilinear(config, &mut out)?,
        Scenario::SweepP => scenarios::sweep_p(config, &mut out)?,
        Scenario::VerifyStrichartz => scenarios::verify_strichartz(config, &mut out)?,
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.scenario,
        config: config.clone(),
        resolved,
        threads: rayon::current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        checksum: out.checksum(),
        outputs: out.files().to_vec(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| HarnessError::Numerical(format!("cannot serialise manifest: {e}")))?;
    out.write_untracked("manifest.json", text.as_bytes())?;
    Ok(manifest)
}
