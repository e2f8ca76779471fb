//! Leading-order band asymptotics for a periodic waveguide whose cells are
//! coupled through small windows.
//!
//! Everything here works on trace data of the limiting cell eigenfunctions:
//! values and normal derivatives at the two junction points. Computing that
//! data from a potential lives in the solver crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bands;
pub mod eigendata;
pub mod error;
pub mod fixtures;
mod golden;
pub mod inner;
pub mod rotation;

pub use bands::{
    band_edges_at_epsilon, band_intervals, log_band_coeff, quadratic_band_coeff, sample_bands,
    BandCoefficients, BandEdges, BandInterval, BandOrder, ExtremumLocation,
};
pub use eigendata::{
    functional_vectors, l_theta, l_theta_prime, CellEigenData, FunctionalVectors, TraceData,
};
pub use error::{Error, Result};
pub use fixtures::{DerivativeConvention, FigureCase};
pub use inner::{
    matching_coefficients, matching_order1, matching_order2, solvability_check, InnerPoint,
    MatchingCoefficients, SolvabilityReport,
};
pub use num_complex::Complex64;
pub use rotation::{rotate_basis, RotationResult};
