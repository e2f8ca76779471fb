//! Finite-volume eigensolvers for a rectangular periodicity cell: the
//! decoupled Neumann cell problem and the quasi-periodic problem coupled
//! through a small window, plus the sweep that compares them with the
//! leading band coefficients.

pub mod assemble;
pub mod banded;
pub mod cell;
pub mod eigen;
pub mod error;
pub mod floquet;
pub mod mesh;
pub mod potential;
pub mod sparse;
pub mod sweep;

pub use cell::{CellSpec, EigenpairSet};
pub use error::{Result, SolverError};
pub use floquet::{FloquetResult, WindowedSpec};
pub use mesh::{Mesh, Refinement};
pub use potential::Potential;
pub use sweep::{rate_sweep, MeshPlan, SweepReport, SweepSpec};
