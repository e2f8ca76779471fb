use thiserror::Error;

use crate::sweep::SweepReport;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    GridError(String),

    #[error("invalid potential: {0}")]
    PotentialError(String),

    #[error("window of half-width {epsilon} spans {intervals} grid intervals, need at least {required}")]
    ResolutionError {
        epsilon: f64,
        intervals: usize,
        required: usize,
    },

    #[error("zero pivot {pivot:.3e} at row {row} while factoring the shifted operator")]
    Factorization { row: usize, pivot: f64 },

    #[error("eigensolver stopped after {iterations} iterations with residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue cluster boundary is ambiguous: gap {gap:.3e} against tolerance {tolerance:.3e}")]
    ClusterAmbiguity { gap: f64, tolerance: f64 },

    #[error("tracked eigenvalues do not cross in [{lower}, {upper}] (differences {at_lower:.6e}, {at_upper:.6e})")]
    NoCrossing {
        lower: f64,
        upper: f64,
        at_lower: f64,
        at_upper: f64,
    },

    #[error("even mode has equal moduli at both junction points: {plus:.6e} and {minus:.6e}")]
    NonDegeneracyViolated { plus: f64, minus: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("convergence trend check failed")]
    TrendViolation(Box<Vec<SweepReport>>),

    #[error(transparent)]
    Core(#[from] windowband_core::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;
