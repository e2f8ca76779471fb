//! Unitary change of eigenbasis adapted to the window functionals.
//!
//! Given traces of an orthonormal basis `psi_1..psi_k`, builds a unitary
//! `a(theta)` such that the rotated functions `Psi_j = sum_i a_ji psi_i`
//! satisfy
//!
//! ```text
//! l_theta(Psi_j)  = 0   for j = 2..k
//! l'_theta(Psi_j) = 0   for j = 3..k
//! ```
//!
//! Row one is `conj(L) / |L|`, so `|l_theta(Psi_1)| = |L|`. Rows two and up
//! are orthonormal combinations of the auxiliary vectors
//! `l(psi_i) e_1 - l(psi_1) e_i`, whitened by `G^{-1/2}` and then rotated so
//! that only `Psi_2` sees `l'`.
//!
//! All work happens on coefficient vectors in `C^k`: since the `psi_i` are
//! orthonormal, orthonormality of coefficient rows is exactly orthonormality
//! of the rotated eigenfunctions.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::eigendata::{l_theta, l_theta_prime, CellEigenData, FunctionalVectors, TraceData};
use crate::error::{Error, Result};

/// Relative slack on the Gram-matrix lower bound `|l(psi_1)|^2`.
pub const GRAM_LOWER_BOUND_SLACK: f64 = 1e-8;

/// `|w|` below this fraction of `|L'|` selects the standard-basis fallback.
pub const DEGENERATE_DIRECTION_RTOL: f64 = 1e-10;

/// Gram-Schmidt drops candidates whose residual falls below this norm.
pub const COMPLETION_DROP_TOL: f64 = 1e-10;

/// Post-construction constraint residuals above this (relative) bound are
/// reported as [`Error::ConstraintResidual`].
pub const CONSTRAINT_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Unit vector `conj(L) / |L|`.
pub fn first_row(data: &CellEigenData, theta: f64) -> Result<Vec<Complex64>> {
    let v = crate::eigendata::functional_vectors(data, theta)?;
    let norm = v.norm_sq_l().sqrt();
    Ok(v.l.iter().map(|z| z.conj() / norm).collect())
}

/// Coefficient vectors of `l(psi_i) psi_1 - l(psi_1) psi_i`, `i = 2..k`.
pub fn tilde_vectors(data: &CellEigenData, theta: f64) -> Result<Vec<Vec<Complex64>>> {
    let k = data.multiplicity();
    if k < 2 {
        return Err(Error::NotApplicable(k));
    }
    let l: Vec<Complex64> = data.traces().iter().map(|t| l_theta(t, theta)).collect();
    if l[0] == ZERO {
        return Err(Error::DegenerateFirstFunctional { theta });
    }
    Ok((1..k)
        .map(|i| {
            let mut v = alloc::vec![ZERO; k];
            v[0] = l[i];
            v[i] = -l[0];
            v
        })
        .collect())
}

/// The `(k-1) x (k-1)` Gram matrix of the auxiliary vectors and its
/// inverse square root.
#[derive(Debug, Clone)]
pub struct GramData {
    pub theta: f64,
    /// `G_ij = l(psi_i) conj(l(psi_j)) + delta_ij |l(psi_1)|^2`, i.e.
    /// `|l(psi_1)|^2 E + Lt Lt^*` with `Lt` read as a column.
    pub g: DMatrix<Complex64>,
    pub g_inv_sqrt: DMatrix<Complex64>,
    /// `(l(psi_2), .., l(psi_k))`.
    pub l_tilde: DVector<Complex64>,
    /// `(l'(psi_2), .., l'(psi_k))`.
    pub lp_tilde: DVector<Complex64>,
    /// `l(psi_1)`.
    pub l_first: Complex64,
    /// `l'(psi_1)`.
    pub lp_first: Complex64,
    pub min_eigenvalue: f64,
}

impl GramData {
    /// Sherman-Morrison inverse
    /// `|l(psi_1)|^{-2} (E - Lt Lt^* / |L|^2)`, with `|L|` the norm of the
    /// full `k`-vector.
    pub fn closed_form_inverse(&self) -> DMatrix<Complex64> {
        let n = self.l_tilde.len();
        let first = self.l_first.norm_sqr();
        let full_norm_sq = first + self.l_tilde.norm_squared();
        let outer = &self.l_tilde * self.l_tilde.adjoint();
        (DMatrix::<Complex64>::identity(n, n) - outer.unscale(full_norm_sq)).unscale(first)
    }

    /// `l'(psi_1) Lt - l(psi_1) Lt'`: the derivative functional applied to
    /// each auxiliary vector.
    pub fn derivative_functional(&self) -> DVector<Complex64> {
        self.l_tilde.map(|z| z * self.lp_first) - self.lp_tilde.map(|z| z * self.l_first)
    }
}

pub fn gram(data: &CellEigenData, theta: f64) -> Result<GramData> {
    let k = data.multiplicity();
    if k < 2 {
        return Err(Error::NotApplicable(k));
    }
    let traces = data.traces();
    let l_first = l_theta(&traces[0], theta);
    if l_first == ZERO {
        return Err(Error::DegenerateFirstFunctional { theta });
    }
    let lp_first = l_theta_prime(&traces[0], theta);
    let l_tilde = DVector::from_iterator(k - 1, traces[1..].iter().map(|t| l_theta(t, theta)));
    let lp_tilde = DVector::from_iterator(
        k - 1,
        traces[1..].iter().map(|t| l_theta_prime(t, theta)),
    );

    let first = l_first.norm_sqr();
    let g = DMatrix::from_fn(k - 1, k - 1, |i, j| {
        let diag = if i == j { first } else { 0.0 };
        l_tilde[i] * l_tilde[j].conj() + diag
    });

    let eig = SymmetricEigen::new(g.clone());
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = first * (1.0 - GRAM_LOWER_BOUND_SLACK);
    if !(min_eigenvalue >= bound) {
        return Err(Error::NotPositiveDefinite {
            smallest: min_eigenvalue,
            bound,
        });
    }
    let inv_sqrt = eig.eigenvalues.map(|mu| Complex64::new(1.0 / mu.sqrt(), 0.0));
    let u = &eig.eigenvectors;
    let g_inv_sqrt = u * DMatrix::from_diagonal(&inv_sqrt) * u.adjoint();

    Ok(GramData {
        theta,
        g,
        g_inv_sqrt,
        l_tilde,
        lp_tilde,
        l_first,
        lp_first,
        min_eigenvalue,
    })
}

/// Adapted basis at one quasi-momentum.
#[derive(Debug, Clone)]
pub struct RotationResult {
    pub theta: f64,
    /// Row `j` holds the coefficients of `Psi_j` in the `psi` basis.
    pub a: DMatrix<Complex64>,
    pub rotated_traces: Vec<TraceData>,
    /// Set when `l'` is already invisible to every admissible combination
    /// and the standard basis was used to complete rows `2..k`.
    pub standard_basis_fallback: bool,
}

impl RotationResult {
    pub fn k(&self) -> usize {
        self.rotated_traces.len()
    }

    /// `max |a a^* - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let k = self.a.nrows();
        let prod = &self.a * self.a.adjoint();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Largest `|l(Psi_j)|` over `j >= 2`.
    pub fn value_constraint_residual(&self) -> f64 {
        self.rotated_traces
            .iter()
            .skip(1)
            .map(|t| l_theta(t, self.theta).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|l'(Psi_j)|` over `j >= 3`.
    pub fn derivative_constraint_residual(&self) -> f64 {
        self.rotated_traces
            .iter()
            .skip(2)
            .map(|t| l_theta_prime(t, self.theta).norm())
            .fold(0.0, f64::max)
    }

    /// `l_theta(Psi_j)`.
    pub fn l(&self, j: usize) -> Complex64 {
        l_theta(&self.rotated_traces[j], self.theta)
    }

    /// `l'_theta(Psi_j)`.
    pub fn lp(&self, j: usize) -> Complex64 {
        l_theta_prime(&self.rotated_traces[j], self.theta)
    }
}

fn rotate_traces(a: &DMatrix<Complex64>, traces: &[TraceData]) -> Vec<TraceData> {
    (0..a.nrows())
        .map(|j| {
            let row: Vec<Complex64> = a.row(j).iter().copied().collect();
            TraceData::combine(&row, traces)
        })
        .collect()
}

/// Orthonormal basis of `C^n` whose first vector is `lead` (unit norm);
/// the rest come from Gram-Schmidt over `e_1, .., e_n` in index order.
fn complete_basis(lead: DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    let mut basis: Vec<DVector<Complex64>> = alloc::vec![lead];
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(n);
        v[i] = ONE;
        // two passes keep the completion orthogonal to working precision
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm >= COMPLETION_DROP_TOL {
            basis.push(v.unscale(norm));
        }
    }
    DMatrix::from_columns(&basis)
}

/// Builds the adapted unitary basis and checks its constraints.
pub fn rotate_basis(data: &CellEigenData, theta: f64) -> Result<RotationResult> {
    let k = data.multiplicity();
    let row1 = first_row(data, theta)?;
    let mut a = DMatrix::<Complex64>::zeros(k, k);
    for (j, c) in row1.iter().enumerate() {
        a[(0, j)] = *c;
    }

    let mut standard_basis_fallback = false;
    if k >= 2 {
        let gd = gram(data, theta)?;
        let w = &gd.g_inv_sqrt * gd.derivative_functional();
        let w_norm = w.norm();
        let scale = FunctionalVectors::evaluate(data, theta).norm_sq_lp().sqrt();
        let z = if w_norm > DEGENERATE_DIRECTION_RTOL * scale && w_norm > 0.0 {
            complete_basis(w.unscale(w_norm), k - 1)
        } else {
            standard_basis_fallback = true;
            DMatrix::<Complex64>::identity(k - 1, k - 1)
        };
        let b = z.adjoint() * &gd.g_inv_sqrt;

        let tilde = tilde_vectors(data, theta)?;
        let v = DMatrix::from_fn(k - 1, k, |i, m| tilde[i][m]);
        let rows = b * v;
        for i in 0..k - 1 {
            let norm = rows.row(i).norm();
            for m in 0..k {
                a[(i + 1, m)] = rows[(i, m)] / norm;
            }
        }
    }

    let result = RotationResult {
        theta,
        rotated_traces: rotate_traces(&a, data.traces()),
        a,
        standard_basis_fallback,
    };

    let scale = data.value_scale().max(1.0);
    let vectors = FunctionalVectors::evaluate(data, theta);
    let dscale = vectors.norm_sq_lp().sqrt().max(1.0);
    let residual = (result.value_constraint_residual() / scale)
        .max(result.derivative_constraint_residual() / dscale)
        .max(result.unitarity_residual());
    if !(residual <= CONSTRAINT_TOL) {
        return Err(Error::ConstraintResidual { theta, residual });
    }
    Ok(result)
}

/// Residuals of the two norm identities satisfied by the adapted basis:
/// `|l(Psi_1)|^2 = |L|^2` and
/// `|l'(Psi_2)|^2 = (|L|^2 |L'|^2 - |(L', L)|^2) / |L|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub value_identity: f64,
    /// Absent when `k = 1`.
    pub derivative_identity: Option<f64>,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.value_identity.max(self.derivative_identity.unwrap_or(0.0))
    }
}

/// Evaluates both identities; reports and never fails.
pub fn check_rotation_identities(
    result: &RotationResult,
    vectors: &FunctionalVectors,
) -> IdentityResiduals {
    let norm_sq_l = vectors.norm_sq_l();
    let value_identity = (result.l(0).norm_sqr() - norm_sq_l).abs();
    let derivative_identity = (result.k() >= 2).then(|| {
        let expected = vectors.gram_determinant() / norm_sq_l;
        (result.lp(1).norm_sqr() - expected).abs()
    });
    IdentityResiduals {
        value_identity,
        derivative_identity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigendata::functional_vectors;
    use crate::fixtures;
    use core::f64::consts::PI;

    #[test]
    fn first_row_examples() {
        let data = fixtures::figure_case_1();
        let row = first_row(&data, PI).unwrap();
        assert!((row[0] - Complex64::new(-0.6, 0.0)).norm() < 1e-15);
        assert!((row[1] - Complex64::new(-0.8, 0.0)).norm() < 1e-15);

        let single = CellEigenData::new(
            0.0,
            alloc::vec![TraceData::new(
                Complex64::new(0.3, 1.1),
                Complex64::new(-0.4, 0.2),
                ZERO,
                ZERO
            )],
        )
        .unwrap();
        let row = first_row(&single, 0.7).unwrap();
        let l = l_theta(&single.traces()[0], 0.7);
        assert!((row[0] - l.conj() / l.norm()).norm() < 1e-15);
        assert!((row[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_vectors_k2() {
        let data = fixtures::figure_case_1();
        let t = tilde_vectors(&data, PI).unwrap();
        assert_eq!(t.len(), 1);
        // L = (-3, -4): (l2, -l1) = (-4, 3)
        assert!((t[0][0] - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
        assert!((t[0][1] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        assert!(matches!(
            tilde_vectors(&fixtures::constant_mode(1.0, 0.0), 1.0),
            Err(Error::NotApplicable(1))
        ));
    }

    #[test]
    fn tilde_vectors_reject_vanishing_first_functional() {
        let data = CellEigenData::new(
            0.0,
            alloc::vec![
                TraceData::real(1.0, 1.0, 0.0, 0.0),
                TraceData::real(1.0, 2.0, 0.0, 0.0)
            ],
        )
        .unwrap();
        assert_eq!(
            tilde_vectors(&data, 0.0),
            Err(Error::DegenerateFirstFunctional { theta: 0.0 })
        );
    }

    #[test]
    fn gram_scalar_case() {
        let data = fixtures::figure_case_1();
        let gd = gram(&data, PI).unwrap();
        assert_eq!(gd.g.nrows(), 1);
        assert!((gd.g[(0, 0)].re - 25.0).abs() < 1e-13);
        let check = &gd.g * &gd.g_inv_sqrt * &gd.g_inv_sqrt;
        assert!((check[(0, 0)] - ONE).norm() < 1e-13);
    }

    #[test]
    fn k2_first_list_rotation() {
        let data = fixtures::figure_case_1();
        let r = rotate_basis(&data, PI).unwrap();
        assert!((r.lp(1).norm_sqr() - 0.01).abs() < 1e-13);
        assert!(r.unitarity_residual() < 1e-14);
        let res = check_rotation_identities(&r, &functional_vectors(&data, PI).unwrap());
        assert!(res.max() < 1e-12, "{res:?}");
    }

    #[test]
    fn k1_rotation_is_a_phase() {
        let data = CellEigenData::new(
            1.0,
            alloc::vec![TraceData::real(0.5, 1.5, 0.2, 0.1)],
        )
        .unwrap();
        let r = rotate_basis(&data, 2.0).unwrap();
        assert!((r.a[(0, 0)].norm() - 1.0).abs() < 1e-15);
        let res = check_rotation_identities(&r, &FunctionalVectors::evaluate(&data, 2.0));
        assert!(res.derivative_identity.is_none());
        assert!(res.value_identity < 1e-14);
    }

    #[test]
    fn parallel_derivative_vector_gives_zero() {
        // L' = 2 L for every theta requires matching structure at both points
        let data = CellEigenData::new(
            0.0,
            alloc::vec![
                TraceData::real(1.0, 2.0, 2.0, -4.0),
                TraceData::real(-0.5, 1.0, -1.0, -2.0),
                TraceData::real(0.3, 0.1, 0.6, -0.2),
            ],
        )
        .unwrap();
        let r = rotate_basis(&data, 1.3).unwrap();
        assert!(r.lp(1).norm() < 1e-12);
        assert!(r.standard_basis_fallback);
        assert!(r.value_constraint_residual() < 1e-12);
    }
}
