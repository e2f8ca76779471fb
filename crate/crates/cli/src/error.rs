use std::path::PathBuf;

use thiserror::Error;
use windowband_solvers::SolverError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TREND: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] windowband_core::Error),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("{failed} inner-layer checks failed")]
    ChecksFailed { failed: usize },

    #[error("convergence trend check failed: {}", failures.join("; "))]
    Trend { failures: Vec<String> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Json { .. } | Self::Config(_) => EXIT_INPUT,
            Self::Core(e) => core_exit(e),
            Self::Write { .. } | Self::ChecksFailed { .. } => EXIT_INTERNAL,
            Self::Trend { .. } => EXIT_TREND,
            Self::Solver(e) => match e {
                SolverError::TrendViolation(_) => EXIT_TREND,
                SolverError::GridError(_)
                | SolverError::PotentialError(_)
                | SolverError::ResolutionError { .. }
                | SolverError::InvalidSweep(_)
                | SolverError::NoCrossing { .. }
                | SolverError::NonDegeneracyViolated { .. } => EXIT_INPUT,
                SolverError::Core(e) => core_exit(e),
                SolverError::Factorization { .. }
                | SolverError::NoConvergence { .. }
                | SolverError::ClusterAmbiguity { .. } => EXIT_INTERNAL,
            },
        }
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Read { .. } => "read_error",
            Self::Write { .. } => "write_error",
            Self::Json { .. } => "json_error",
            Self::Config(_) => "config_error",
            Self::Core(e) => core_kind(e),
            Self::ChecksFailed { .. } => "checks_failed",
            Self::Trend { .. } => "trend_violation",
            Self::Solver(e) => match e {
                SolverError::GridError(_) => "grid_error",
                SolverError::PotentialError(_) => "potential_error",
                SolverError::ResolutionError { .. } => "resolution_error",
                SolverError::Factorization { .. } => "factorization_error",
                SolverError::NoConvergence { .. } => "no_convergence",
                SolverError::ClusterAmbiguity { .. } => "cluster_ambiguity",
                SolverError::NoCrossing { .. } => "no_crossing",
                SolverError::NonDegeneracyViolated { .. } => "non_degeneracy_violated",
                SolverError::InvalidSweep(_) => "invalid_sweep",
                SolverError::TrendViolation(_) => "trend_violation",
                SolverError::Core(e) => core_kind(e),
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

fn core_exit(e: &windowband_core::Error) -> i32 {
    use windowband_core::Error as E;
    match e {
        E::NotPositiveDefinite { .. } | E::ConstraintResidual { .. } => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn core_kind(e: &windowband_core::Error) -> &'static str {
    use windowband_core::Error as E;
    match e {
        E::NonDegeneracyViolated { .. } => "non_degeneracy_violated",
        E::DegenerateL { .. } => "degenerate_functional",
        _ => "invalid_eigendata",
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
