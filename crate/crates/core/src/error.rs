use thiserror::Error;

/// Failures raised by the band-coefficient pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cell data must contain at least one trace")]
    EmptyTraces,

    #[error("trace {index} has a non-finite entry")]
    NonFiniteTrace { index: usize },

    #[error("limiting eigenvalue {0} is not finite")]
    NonFiniteEigenvalue(f64),

    #[error(
        "non-degeneracy violated: |psi_1(M+)| = {plus:.6e} and |psi_1(M-)| = {minus:.6e} coincide"
    )]
    NonDegeneracyViolated { plus: f64, minus: f64 },

    #[error("boundary functional vector L vanishes at theta = {theta} (|L| = {norm:.3e})")]
    DegenerateL { theta: f64, norm: f64 },

    #[error("first boundary functional l(psi_1) vanishes at theta = {theta}")]
    DegenerateFirstFunctional { theta: f64 },

    #[error("operation needs multiplicity k >= 2, got k = {0}")]
    NotApplicable(usize),

    #[error(
        "Gram matrix lost positivity: smallest eigenvalue {smallest:.6e} below bound {bound:.6e}"
    )]
    NotPositiveDefinite { smallest: f64, bound: f64 },

    #[error("rotated basis misses its constraints: residual {residual:.3e} at theta = {theta}")]
    ConstraintResidual { theta: f64, residual: f64 },

    #[error("inner point ({xi1}, {xi2}) lies outside the closed upper half-plane")]
    DomainError { xi1: f64, xi2: f64 },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("band intervals overlap at epsilon = {epsilon} by {overlap:.6e}")]
    BandsOverlap { epsilon: f64, overlap: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
