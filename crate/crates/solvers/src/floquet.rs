//! Quasi-periodic problem on the cell with the two lateral sides glued
//! through the window `|x2| < eps` and Neumann conditions elsewhere.

use num_complex::Complex64;

use crate::assemble::{assemble, Assembled, Coupling};
use crate::cell::CellSpec;
use crate::eigen::{EigenOptions, ShiftInvert};
use crate::error::{Result, SolverError};
use crate::sparse::Scalar;

/// Minimum number of grid intervals inside `(-eps, eps)`.
pub const MIN_WINDOW_INTERVALS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSpec {
    pub base: CellSpec,
    pub epsilon: f64,
    pub theta: f64,
}

impl WindowedSpec {
    pub fn new(base: CellSpec, epsilon: f64, theta: f64) -> Result<Self> {
        let half = base.height() / 2.0;
        if !(epsilon > 0.0 && epsilon < half) {
            return Err(SolverError::GridError(format!(
                "window half-width {epsilon} outside (0, {half})"
            )));
        }
        if !theta.is_finite() {
            return Err(SolverError::GridError(format!("quasi-momentum {theta} is not finite")));
        }
        let intervals = base.mesh.window_intervals(epsilon);
        if intervals < MIN_WINDOW_INTERVALS {
            return Err(SolverError::ResolutionError {
                epsilon,
                intervals,
                required: MIN_WINDOW_INTERVALS,
            });
        }
        Ok(Self {
            base,
            epsilon,
            theta,
        })
    }

    /// Rows of the lateral sides that belong to the window.
    pub fn window_mask(&self) -> Vec<bool> {
        self.base
            .mesh
            .x2
            .iter()
            .map(|x| x.abs() < self.epsilon)
            .collect()
    }
}

/// Operator with an arbitrary set of glued rows.
pub fn assemble_with_mask(base: &CellSpec, mask: Vec<bool>, theta: f64) -> Result<Assembled<Complex64>> {
    if mask.len() != base.mesh.n2() {
        return Err(SolverError::GridError(format!(
            "window mask has {} rows, mesh has {}",
            mask.len(),
            base.mesh.n2()
        )));
    }
    let samples = base.potential.sample(&base.mesh)?;
    let coupling = Coupling {
        window: mask,
        phase: Complex64::phase(theta).expect("complex phases always exist"),
    };
    Ok(assemble(&base.mesh, &samples, Some(&coupling)))
}

pub fn assemble_windowed(spec: &WindowedSpec) -> Result<Assembled<Complex64>> {
    assemble_with_mask(&spec.base, spec.window_mask(), spec.theta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetResult {
    pub epsilon: f64,
    pub theta: f64,
    pub lambda0: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(lambda^(1) - lambda0) |ln eps|`.
    pub r1: f64,
    /// `(lambda^(2) - lambda0) / eps^2`.
    pub r2: Option<f64>,
    /// `(lambda^(j) - lambda0) / eps^3` for `j >= 3`.
    pub r3: Vec<f64>,
}

impl FloquetResult {
    /// Eigenvalues ordered by branch: the one farthest from `lambda0`
    /// first, since successive branches approach it at faster rates.
    pub fn branches(&self) -> Vec<f64> {
        let mut b = self.eigenvalues.clone();
        b.sort_by(|x, y| (y - self.lambda0).abs().total_cmp(&(x - self.lambda0).abs()));
        b
    }

    /// Smallest `lambda - lambda0` over the tracked eigenvalues.
    pub fn min_offset(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l - self.lambda0)
            .fold(f64::INFINITY, f64::min)
    }

    fn from_values(spec: &WindowedSpec, lambda0: f64, values: Vec<f64>, residuals: Vec<f64>) -> Self {
        let mut out = Self {
            epsilon: spec.epsilon,
            theta: spec.theta,
            lambda0,
            eigenvalues: values,
            residuals,
            r1: f64::NAN,
            r2: None,
            r3: Vec::new(),
        };
        let eps = spec.epsilon;
        let branches = out.branches();
        out.r1 = (branches[0] - lambda0) * eps.ln().abs();
        out.r2 = branches.get(1).map(|l| (l - lambda0) / (eps * eps));
        out.r3 = branches
            .iter()
            .skip(2)
            .map(|l| (l - lambda0) / (eps * eps * eps))
            .collect();
        out
    }
}

/// The `count` eigenvalues of the windowed problem nearest `lambda0`.
pub fn eigen_near(spec: &WindowedSpec, lambda0: f64, count: usize, seed: u64) -> Result<FloquetResult> {
    let op = assemble_windowed(spec)?;
    let delta = 1e-3 * lambda0.abs().max(1.0);
    let mut opts = EigenOptions::new(count, lambda0);
    opts.seed = seed;
    let pairs = ShiftInvert::new(&op.matrix, lambda0 - delta)?.solve(&opts, None, None)?;
    Ok(FloquetResult::from_values(spec, lambda0, pairs.values, pairs.residuals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use crate::potential::Potential;
    use crate::sparse::CsrMatrix;
    use std::f64::consts::PI;

    fn base() -> CellSpec {
        CellSpec::uniform(1.0, 16, 32, Potential::separable_cosine(3.0, 1.0, 0.5)).unwrap()
    }

    fn dense_spectrum(m: &CsrMatrix<Complex64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.to_dense().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn resolution_guard() {
        assert!(matches!(
            WindowedSpec::new(base(), 0.05, 1.0),
            Err(SolverError::ResolutionError { .. })
        ));
        assert!(WindowedSpec::new(base(), 0.2, 1.0).is_ok());
        assert!(WindowedSpec::new(base(), 0.5, 1.0).is_err());
    }

    #[test]
    fn zero_momentum_is_real() {
        let a = assemble_windowed(&WindowedSpec::new(base(), 0.2, 0.0).unwrap()).unwrap();
        assert_eq!(a.matrix.hermitian_defect(), 0.0);
        for i in 0..a.dofs() {
            assert!(a.matrix.row(i).all(|(_, v)| v.im == 0.0));
        }
    }

    #[test]
    fn conjugate_momentum_same_spectrum() {
        for theta in [0.7, PI / 2.0, 2.5] {
            let a = assemble_windowed(&WindowedSpec::new(base(), 0.2, theta).unwrap()).unwrap();
            let b = assemble_windowed(&WindowedSpec::new(base(), 0.2, 2.0 * PI - theta).unwrap()).unwrap();
            assert_eq!(a.matrix.hermitian_defect(), 0.0);
            for (x, y) in dense_spectrum(&a.matrix).iter().zip(dense_spectrum(&b.matrix)) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    /// Periodic discretization built directly on the torus columns.
    fn periodic_reference(mesh: &Mesh, v: &[f64]) -> nalgebra::DMatrix<f64> {
        let n1 = mesh.n1() - 1;
        let n2 = mesh.n2();
        let h1: Vec<f64> = (0..n1).map(|i| mesh.x1[i + 1] - mesh.x1[i]).collect();
        let d2 = Mesh::dual(&mesh.x2);
        let id = |i: usize, j: usize| j * n1 + i;
        let n = n1 * n2;
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut mass = vec![0.0; n];
        for j in 0..n2 {
            for i in 0..n1 {
                let prev = (i + n1 - 1) % n1;
                let dual1 = 0.5 * (h1[i] + h1[prev]);
                mass[id(i, j)] = dual1 * d2[j];
                a[(id(i, j), id(i, j))] += dual1 * d2[j] * v[mesh.index(i, j)];
                let mut link = |p: usize, q: usize, w: f64| {
                    a[(p, p)] += w;
                    a[(q, q)] += w;
                    a[(p, q)] -= w;
                    a[(q, p)] -= w;
                };
                link(id(i, j), id((i + 1) % n1, j), d2[j] / h1[i]);
                if j + 1 < n2 {
                    link(id(i, j), id(i, j + 1), dual1 / (mesh.x2[j + 1] - mesh.x2[j]));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                a[(p, q)] /= (mass[p] * mass[q]).sqrt();
            }
        }
        a
    }

    #[test]
    fn full_window_matches_periodic_cell() {
        let b = base();
        let a = assemble_with_mask(&b, vec![true; b.mesh.n2()], 0.0).unwrap();
        let reference = periodic_reference(&b.mesh, &b.potential.sample(&b.mesh).unwrap());
        let ours = a.matrix.to_dense();
        assert_eq!(ours.nrows(), reference.nrows());
        let scale = reference.amax();
        for (x, y) in ours.iter().zip(reference.iter()) {
            assert!((x.im == 0.0) && (x.re - y).abs() < 1e-12 * scale);
        }
        let mut spectrum: Vec<f64> = reference.symmetric_eigenvalues().iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        for (x, y) in dense_spectrum(&a.matrix).iter().zip(&spectrum) {
            assert!((x - y).abs() < 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn eigenvalues_lie_right_of_the_cell_eigenvalue() {
        let b = base();
        let (data, _) = crate::cell::cell_eigendata(&b, 3, None, 1e-7, 1).unwrap();
        let spec = WindowedSpec::new(b, 0.2, 2.0).unwrap();
        let r = eigen_near(&spec, data.lambda0(), 1, 1).unwrap();
        assert!(r.min_offset() > -1e-9);
        assert!(r.residuals[0] < 1e-8);
        assert!(r.r1 > 0.0);
    }
}
