//! Limiting-cell spectral data and the boundary functionals built from it.
//!
//! A cell eigenvalue `lambda0` of multiplicity `k` enters the band
//! asymptotics only through the values and `x2`-derivatives of an
//! orthonormal eigenbasis at the two junction points `M- = (0, 0)` and
//! `M+ = (1, 0)`. Those four numbers per eigenfunction are a [`TraceData`].
//!
//! Inner products on `C^k` follow `(u, v) = sum_j u_j conj(v_j)`. The band
//! coefficients only see `|(L', L)|^2`, so the choice of which slot is
//! conjugated does not leak into any result.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used when testing `|psi_1(M+)| != |psi_1(M-)|`.
pub const NON_DEGENERACY_RTOL: f64 = 1e-9;

/// `|L|` below this fraction of the trace scale counts as vanishing.
pub const DEGENERATE_L_RTOL: f64 = 1e-10;

/// `e^{-i theta}`.
#[inline]
pub(crate) fn phase_minus(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), -theta.sin())
}

/// Values and `x2`-derivatives of one eigenfunction at `M+` and `M-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceData {
    pub value_plus: Complex64,
    pub value_minus: Complex64,
    pub deriv_plus: Complex64,
    pub deriv_minus: Complex64,
}

impl TraceData {
    pub fn new(
        value_plus: Complex64,
        value_minus: Complex64,
        deriv_plus: Complex64,
        deriv_minus: Complex64,
    ) -> Self {
        Self {
            value_plus,
            value_minus,
            deriv_plus,
            deriv_minus,
        }
    }

    /// Convenience constructor for real-valued eigenfunctions.
    pub fn real(value_plus: f64, value_minus: f64, deriv_plus: f64, deriv_minus: f64) -> Self {
        Self::new(
            Complex64::new(value_plus, 0.0),
            Complex64::new(value_minus, 0.0),
            Complex64::new(deriv_plus, 0.0),
            Complex64::new(deriv_minus, 0.0),
        )
    }

    pub fn is_finite(&self) -> bool {
        [
            self.value_plus,
            self.value_minus,
            self.deriv_plus,
            self.deriv_minus,
        ]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.value_plus.im == 0.0
            && self.value_minus.im == 0.0
            && self.deriv_plus.im == 0.0
            && self.deriv_minus.im == 0.0
    }

    /// Traces of `sum_m coeffs[m] * psi_m`.
    pub fn combine(coeffs: &[Complex64], traces: &[TraceData]) -> TraceData {
        debug_assert_eq!(coeffs.len(), traces.len());
        let zero = Complex64::new(0.0, 0.0);
        let mut out = TraceData::new(zero, zero, zero, zero);
        for (c, t) in coeffs.iter().zip(traces) {
            out.value_plus += c * t.value_plus;
            out.value_minus += c * t.value_minus;
            out.deriv_plus += c * t.deriv_plus;
            out.deriv_minus += c * t.deriv_minus;
        }
        out
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: Complex64) -> TraceData {
        TraceData::new(
            c * self.value_plus,
            c * self.value_minus,
            c * self.deriv_plus,
            c * self.deriv_minus,
        )
    }
}

/// `l_theta(psi) = psi(M+) e^{-i theta} - psi(M-)`.
pub fn l_theta(trace: &TraceData, theta: f64) -> Complex64 {
    trace.value_plus * phase_minus(theta) - trace.value_minus
}

/// `l'_theta(psi) = d_x2 psi(M+) e^{-i theta} + d_x2 psi(M-)`.
///
/// Note the plus sign: the derivative functional adds the two traces.
pub fn l_theta_prime(trace: &TraceData, theta: f64) -> Complex64 {
    trace.deriv_plus * phase_minus(theta) + trace.deriv_minus
}

/// A limiting eigenvalue together with the traces of an orthonormal
/// eigenbasis of its eigenspace.
///
/// Orthonormality lives in the cell, not in the traces; it is the caller's
/// responsibility and is never re-imposed here.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEigenData {
    lambda0: f64,
    traces: Vec<TraceData>,
}

impl CellEigenData {
    /// Structural validation only: finite entries and at least one trace.
    ///
    /// The non-degeneracy condition is checked separately by
    /// [`CellEigenData::check_non_degeneracy`], because several legitimate
    /// inputs (the constant Neumann ground state, for one) violate it and are
    /// still meaningful for the log-band coefficient.
    pub fn new(lambda0: f64, traces: Vec<TraceData>) -> Result<Self> {
        if !lambda0.is_finite() {
            return Err(Error::NonFiniteEigenvalue(lambda0));
        }
        if traces.is_empty() {
            return Err(Error::EmptyTraces);
        }
        if let Some(index) = traces.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFiniteTrace { index });
        }
        Ok(Self { lambda0, traces })
    }

    /// Builds the data and additionally requires `|psi_1(M+)| != |psi_1(M-)|`.
    pub fn new_non_degenerate(lambda0: f64, traces: Vec<TraceData>) -> Result<Self> {
        let data = Self::new(lambda0, traces)?;
        data.check_non_degeneracy()?;
        Ok(data)
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn multiplicity(&self) -> usize {
        self.traces.len()
    }

    pub fn traces(&self) -> &[TraceData] {
        &self.traces
    }

    pub fn all_real(&self) -> bool {
        self.traces.iter().all(TraceData::is_real)
    }

    /// Fails when `||psi_1(M+)| - |psi_1(M-)||` is within the relative
    /// tolerance [`NON_DEGENERACY_RTOL`] of the larger modulus.
    pub fn check_non_degeneracy(&self) -> Result<()> {
        let first = &self.traces[0];
        let plus = first.value_plus.norm();
        let minus = first.value_minus.norm();
        let scale = plus.max(minus);
        if scale == 0.0 || (plus - minus).abs() <= NON_DEGENERACY_RTOL * scale {
            return Err(Error::NonDegeneracyViolated { plus, minus });
        }
        Ok(())
    }

    /// Root-sum-square of all value traces; sets the scale for `|L| ~ 0`.
    pub fn value_scale(&self) -> f64 {
        self.traces
            .iter()
            .map(|t| t.value_plus.norm_sqr() + t.value_minus.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// The vectors `L = (l_theta(psi_j))_j` and `L' = (l'_theta(psi_j))_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalVectors {
    pub theta: f64,
    pub l: Vec<Complex64>,
    pub lp: Vec<Complex64>,
    scale: f64,
}

impl FunctionalVectors {
    /// Evaluates both functionals on every trace; never fails.
    pub fn evaluate(data: &CellEigenData, theta: f64) -> Self {
        let l = data.traces().iter().map(|t| l_theta(t, theta)).collect();
        let lp = data
            .traces()
            .iter()
            .map(|t| l_theta_prime(t, theta))
            .collect();
        Self {
            theta,
            l,
            lp,
            scale: data.value_scale(),
        }
    }

    pub fn k(&self) -> usize {
        self.l.len()
    }

    /// `|L|^2`.
    pub fn norm_sq_l(&self) -> f64 {
        self.l.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|L'|^2`.
    pub fn norm_sq_lp(&self) -> f64 {
        self.lp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(L', L) = sum_j L'_j conj(L_j)`.
    pub fn inner_lp_l(&self) -> Complex64 {
        self.lp
            .iter()
            .zip(&self.l)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// `|L|^2 |L'|^2 - |(L', L)|^2`, clamped at zero against round-off.
    pub fn gram_determinant(&self) -> f64 {
        (self.norm_sq_l() * self.norm_sq_lp() - self.inner_lp_l().norm_sqr()).max(0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        let norm = self.norm_sq_l().sqrt();
        norm <= DEGENERATE_L_RTOL * self.scale
    }

    pub fn require_non_degenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::DegenerateL {
                theta: self.theta,
                norm: self.norm_sq_l().sqrt(),
            });
        }
        Ok(())
    }
}

/// [`FunctionalVectors::evaluate`] followed by the `|L| > 0` check.
pub fn functional_vectors(data: &CellEigenData, theta: f64) -> Result<FunctionalVectors> {
    let v = FunctionalVectors::evaluate(data, theta);
    v.require_non_degenerate()?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use core::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn l_theta_examples() {
        let t = TraceData::real(1.0, 2.0, 1.5, 2.5);
        assert!((l_theta(&t, 0.0) - c(-1.0)).norm() < 1e-15);
        assert!((l_theta(&t, PI) - c(-3.0)).norm() < 1e-15);
        let sym = TraceData::real(0.7, 0.7, 0.0, 0.0);
        assert_eq!(l_theta(&sym, 0.0), c(0.0));
    }

    #[test]
    fn l_theta_prime_examples() {
        let t = TraceData::real(1.0, 2.0, 1.5, 2.5);
        assert!((l_theta_prime(&t, PI) - c(1.0)).norm() < 1e-15);
        let anti = TraceData::real(0.0, 0.0, 0.3, -0.3);
        assert_eq!(l_theta_prime(&anti, 0.0), c(0.0));
        let t2 = TraceData::real(1.0, 3.0, 0.5, 2.0);
        assert!((l_theta_prime(&t2, PI) - c(1.5)).norm() < 1e-15);
    }

    #[test]
    fn functional_vectors_first_list() {
        let data = fixtures::figure_case_1();
        let v = functional_vectors(&data, PI).unwrap();
        assert!((v.l[0] - c(-3.0)).norm() < 1e-15);
        assert!((v.l[1] - c(-4.0)).norm() < 1e-15);
        assert!((v.lp[0] - c(1.0)).norm() < 1e-15);
        assert!((v.lp[1] - c(1.5)).norm() < 1e-15);
        assert!((v.norm_sq_l() - 25.0).abs() < 1e-13);

        let v0 = functional_vectors(&data, 0.0).unwrap();
        assert_eq!(v0.l, [c(-1.0), c(-2.0)]);
        assert_eq!(v0.norm_sq_l(), 5.0);
        assert_eq!(v0.inner_lp_l(), c(-9.0));
    }

    #[test]
    fn constant_mode_norm() {
        let area: f64 = 0.8;
        let v = area.powf(-0.5);
        let data = CellEigenData::new(0.0, alloc::vec![TraceData::real(v, v, 0.0, 0.0)]).unwrap();
        for theta in [0.3, 1.0, 2.5, 4.0] {
            let f = FunctionalVectors::evaluate(&data, theta);
            let expected = 2.0 * (1.0 - theta.cos()) / area;
            assert!((f.norm_sq_l() - expected).abs() < 1e-13);
        }
        assert!(matches!(
            functional_vectors(&data, 0.0),
            Err(Error::DegenerateL { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(CellEigenData::new(1.0, Vec::new()), Err(Error::EmptyTraces));
        let bad = TraceData::real(f64::NAN, 1.0, 0.0, 0.0);
        assert_eq!(
            CellEigenData::new(1.0, alloc::vec![TraceData::real(1.0, 2.0, 0.0, 0.0), bad]),
            Err(Error::NonFiniteTrace { index: 1 })
        );
        assert!(matches!(
            CellEigenData::new(f64::INFINITY, alloc::vec![bad]),
            Err(Error::NonFiniteEigenvalue(_))
        ));
        let sym = TraceData::new(
            Complex64::new(0.6, 0.8),
            Complex64::new(1.0, 0.0),
            c(0.0),
            c(0.0),
        );
        assert!(matches!(
            CellEigenData::new_non_degenerate(1.0, alloc::vec![sym]),
            Err(Error::NonDegeneracyViolated { .. })
        ));
    }
}
