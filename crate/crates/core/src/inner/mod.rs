//! Boundary-layer profiles near the window endpoints and the matching
//! coefficients that tie them to the outer expansion.
//!
//! In rescaled window coordinates `xi` (window `|xi1| < 1` on `xi2 = 0`)
//! the two profiles are
//!
//! ```text
//! log profile:    Re ln(z + sqrt(z^2 - 1))
//! dipole profile: Re sqrt(z^2 - 1)
//! ```
//!
//! with `z = xi1 + i xi2`. Both vanish on the window, have zero normal
//! derivative on the rest of the line and grow like `ln|xi| + ln 2` and
//! `xi1` respectively.

pub mod checks;

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::eigendata::{l_theta, l_theta_prime};
use crate::error::{Error, Result};
use crate::rotation::RotationResult;

/// Step for finite-difference derivatives of inner fields.
pub const FLUX_STEP: f64 = 1e-5;

/// A point of the closed upper half-plane in rescaled coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerPoint {
    pub xi1: f64,
    pub xi2: f64,
}

impl InnerPoint {
    pub fn new(xi1: f64, xi2: f64) -> Result<Self> {
        if !(xi2 >= 0.0) || !xi1.is_finite() || !xi2.is_finite() {
            return Err(Error::DomainError { xi1, xi2 });
        }
        Ok(Self { xi1, xi2 })
    }

    pub fn polar(r: f64, phi: f64) -> Result<Self> {
        Self::new(r * libm::cos(phi), (r * libm::sin(phi)).max(0.0))
    }

    pub fn radius(&self) -> f64 {
        libm::hypot(self.xi1, self.xi2)
    }

    fn z(&self) -> Complex64 {
        // +0.0 keeps the boundary on the upper side of every branch cut
        Complex64::new(self.xi1, self.xi2 + 0.0)
    }
}

/// `sqrt(w^2 - 1)` on the branch that is positive for real `w > 1` and
/// behaves like `w` for large `w` in the upper half-plane.
fn window_root(w: Complex64) -> Complex64 {
    (w - 1.0).sqrt() * (w + 1.0).sqrt()
}

fn log_of(w: Complex64) -> f64 {
    (w + window_root(w)).ln().re
}

/// Profile with logarithmic growth: zero on the window, Neumann outside it.
pub fn log_profile(p: InnerPoint) -> f64 {
    log_of(p.z())
}

/// Profile with linear growth: zero on the window, Neumann outside it.
pub fn dipole_profile(p: InnerPoint) -> f64 {
    window_root(p.z()).re
}

/// The log profile evaluated at `sin z` instead of `z`. It vanishes on the
/// whole real axis, so it misses the Neumann condition outside the window;
/// kept for comparison only.
pub fn log_profile_sine_argument(p: InnerPoint) -> f64 {
    log_of(p.z().sin())
}

/// `log_profile(p) - ln|xi| - ln 2`.
pub fn log_far_field_residual(p: InnerPoint) -> f64 {
    log_profile(p) - libm::log(p.radius()) - LN_2
}

/// `dipole_profile(p) - xi1 + cos(phi) / (2 r)`.
pub fn dipole_far_field_residual(p: InnerPoint) -> f64 {
    let r = p.radius();
    dipole_profile(p) - p.xi1 + p.xi1 / r / (2.0 * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Junction at `M+ = (1, 0)`.
    Plus,
    /// Junction at `M- = (0, 0)`.
    Minus,
}

/// A complex coefficient for each junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidePair {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl SidePair {
    pub fn get(&self, side: Side) -> Complex64 {
        match side {
            Side::Plus => self.plus,
            Side::Minus => self.minus,
        }
    }

    /// `|plus - sign e^{i theta} minus|`.
    fn phase_residual(&self, theta: f64, sign: f64) -> f64 {
        (self.plus - Complex64::from_polar(sign, theta) * self.minus).norm()
    }
}

/// Leading-order inner coefficients: the field near each junction is
/// `log * log_profile + shift * ln(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMatching {
    pub theta: f64,
    pub log: SidePair,
    pub shift: SidePair,
}

impl LogMatching {
    /// Largest deviation from `log+ = -e^{i theta} log-` and
    /// `shift+ = e^{i theta} shift-`.
    pub fn phase_residual(&self) -> f64 {
        self.log
            .phase_residual(self.theta, -1.0)
            .max(self.shift.phase_residual(self.theta, 1.0))
    }

    /// Largest `|shift - log - Psi_1(M)|` over both junctions.
    pub fn consistency_residual(&self, rotation: &RotationResult) -> f64 {
        let t = &rotation.rotated_traces[0];
        let plus = (self.shift.plus - self.log.plus - t.value_plus).norm();
        let minus = (self.shift.minus - self.log.minus - t.value_minus).norm();
        plus.max(minus)
    }

    pub fn inner_field(&self, p: InnerPoint, side: Side, epsilon: f64) -> Complex64 {
        self.log.get(side) * log_profile(p) + self.shift.get(side) * libm::log(epsilon)
    }
}

/// Next-order inner coefficients for the second adapted function: the
/// inner field is `dipole * dipole_profile + linear * xi1`, and the outer
/// corrector carries `outer_log * ln|x - M|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleMatching {
    pub theta: f64,
    pub dipole: SidePair,
    pub linear: SidePair,
    pub outer_log: SidePair,
}

impl DipoleMatching {
    /// Largest deviation from `dipole+ = -e^{i theta} dipole-`,
    /// `linear+ = e^{i theta} linear-` and `outer_log+ = -e^{i theta} outer_log-`.
    pub fn phase_residual(&self) -> f64 {
        self.dipole
            .phase_residual(self.theta, -1.0)
            .max(self.linear.phase_residual(self.theta, 1.0))
            .max(self.outer_log.phase_residual(self.theta, -1.0))
    }

    /// `dipole + linear` equals `d Psi_2/dx2` at `M+` and its negative at `M-`.
    pub fn derivative_sum_residual(&self, rotation: &RotationResult) -> f64 {
        let t = &rotation.rotated_traces[1];
        let plus = (self.dipole.plus + self.linear.plus - t.deriv_plus).norm();
        let minus = (self.dipole.minus + self.linear.minus + t.deriv_minus).norm();
        plus.max(minus)
    }

    pub fn inner_field(&self, p: InnerPoint, side: Side) -> Complex64 {
        self.dipole.get(side) * dipole_profile(p) + self.linear.get(side) * p.xi1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingCoefficients {
    pub log: LogMatching,
    /// Absent when `k = 1`.
    pub dipole: Option<DipoleMatching>,
}

pub fn matching_order1(rotation: &RotationResult) -> LogMatching {
    let theta = rotation.theta;
    let t = &rotation.rotated_traces[0];
    let e_plus = Complex64::from_polar(1.0, theta);
    let e_minus = e_plus.conj();
    LogMatching {
        theta,
        log: SidePair {
            plus: 0.5 * (t.value_minus * e_plus - t.value_plus),
            minus: 0.5 * (t.value_plus * e_minus - t.value_minus),
        },
        shift: SidePair {
            plus: 0.5 * (t.value_minus * e_plus + t.value_plus),
            minus: 0.5 * (t.value_plus * e_minus + t.value_minus),
        },
    }
}

pub fn matching_order2(rotation: &RotationResult) -> Result<DipoleMatching> {
    let k = rotation.k();
    if k < 2 {
        return Err(Error::NotApplicable(k));
    }
    let theta = rotation.theta;
    let e_plus = Complex64::from_polar(1.0, theta);
    let e_minus = e_plus.conj();
    let t2 = &rotation.rotated_traces[1];
    let (dp, dm) = (t2.deriv_plus, t2.deriv_minus);
    let dipole = SidePair {
        plus: 0.5 * (e_plus * dm + dp),
        minus: -0.5 * (e_minus * dp + dm),
    };
    let linear = SidePair {
        plus: 0.5 * (dp - e_plus * dm),
        minus: -0.5 * (dm - e_minus * dp),
    };

    // first-function solvability with zero left side fixes outer_log-
    let t1 = &rotation.rotated_traces[0];
    let value_jump = t1.value_minus - e_minus * t1.value_plus;
    let deriv_sum = t1.deriv_minus + e_minus * t1.deriv_plus;
    let scale = t1.value_plus.norm().max(t1.value_minus.norm());
    if !(value_jump.norm() > crate::eigendata::DEGENERATE_L_RTOL * scale) {
        return Err(Error::DegenerateL {
            theta,
            norm: value_jump.norm(),
        });
    }
    let outer_minus = dipole.minus * deriv_sum.conj() / (4.0 * value_jump.conj());
    Ok(DipoleMatching {
        theta,
        dipole,
        linear,
        outer_log: SidePair {
            plus: -e_plus * outer_minus,
            minus: outer_minus,
        },
    })
}

pub fn matching_coefficients(rotation: &RotationResult) -> Result<MatchingCoefficients> {
    let log = matching_order1(rotation);
    let dipole = if rotation.k() >= 2 {
        Some(matching_order2(rotation)?)
    } else {
        None
    };
    Ok(MatchingCoefficients { log, dipole })
}

/// Right-hand sides of the solvability conditions for each adapted function.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvabilityReport {
    pub theta: f64,
    /// Leading order, one entry per adapted function.
    pub first_order: Vec<Complex64>,
    /// Next order for the second adapted function's corrector, one entry
    /// per adapted function (absent when `k = 1`).
    pub second_order: Option<Vec<Complex64>>,
}

impl SolvabilityReport {
    /// `|first_order[0] - expected|`.
    pub fn log_coeff_residual(&self, expected: f64) -> f64 {
        (self.first_order[0] - expected).norm()
    }

    /// `|second_order[1] - expected|`.
    pub fn quadratic_coeff_residual(&self, expected: f64) -> Option<f64> {
        self.second_order.as_ref().map(|s| (s[1] - expected).norm())
    }

    /// Largest entry that must vanish: `first_order[j]` for `j >= 2` and
    /// `second_order[j]` for `j = 1` and `j >= 3`.
    pub fn vanishing_residual(&self) -> f64 {
        let first = self.first_order.iter().skip(1).map(|z| z.norm());
        let second = self
            .second_order
            .iter()
            .flat_map(|s| s.iter().enumerate())
            .filter(|(j, _)| *j != 1)
            .map(|(_, z)| z.norm());
        first.chain(second).fold(0.0, f64::max)
    }
}

pub fn solvability_check(rotation: &RotationResult) -> Result<SolvabilityReport> {
    let theta = rotation.theta;
    let l1 = rotation.l(0);
    let first_order = (0..rotation.k())
        .map(|j| -0.5 * PI * rotation.l(j).conj() * l1)
        .collect();
    let second_order = if rotation.k() >= 2 {
        let m = matching_order2(rotation)?;
        let e_minus = Complex64::from_polar(1.0, -theta);
        Some(
            rotation
                .rotated_traces
                .iter()
                .map(|t| {
                    let jump = t.value_minus - e_minus * t.value_plus;
                    let sum = t.deriv_minus + e_minus * t.deriv_plus;
                    PI * m.outer_log.minus * jump.conj() - 0.25 * PI * m.dipole.minus * sum.conj()
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(SolvabilityReport {
        theta,
        first_order,
        second_order,
    })
}

/// `l_theta` and `l'_theta` of the adapted functions, for diagnostics.
pub fn adapted_functionals(rotation: &RotationResult) -> Vec<(Complex64, Complex64)> {
    rotation
        .rotated_traces
        .iter()
        .map(|t| (l_theta(t, rotation.theta), l_theta_prime(t, rotation.theta)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::{log_band_coeff, quadratic_band_coeff};
    use crate::eigendata::{CellEigenData, FunctionalVectors, TraceData};
    use crate::fixtures;
    use crate::rotation::rotate_basis;

    fn pt(a: f64, b: f64) -> InnerPoint {
        InnerPoint::new(a, b).unwrap()
    }

    #[test]
    fn log_profile_examples() {
        assert!(log_profile(pt(0.5, 0.0)).abs() < 1e-15);
        assert!((log_profile(pt(2.0, 0.0)) - 1.316957896924816).abs() < 1e-14);
        assert!((log_profile(pt(-2.0, 0.0)) - 1.316957896924816).abs() < 1e-14);
        assert!((log_profile(pt(0.0, 100.0)) - libm::log(200.0)).abs() < 5e-5);
        assert!(InnerPoint::new(0.0, -1e-3).is_err());
    }

    #[test]
    fn dipole_profile_examples() {
        assert_eq!(dipole_profile(pt(0.5, 0.0)), 0.0);
        assert!((dipole_profile(pt(2.0, 0.0)) - libm::sqrt(3.0)).abs() < 1e-15);
        assert!((dipole_profile(pt(100.0, 0.0)) - (100.0 - 0.005)).abs() < 1e-5);
        // odd in xi1
        assert!((dipole_profile(pt(-2.0, 0.0)) + libm::sqrt(3.0)).abs() < 1e-15);
    }

    #[test]
    fn sine_argument_vanishes_on_real_axis() {
        for x in [-3.0, -1.5, 0.2, 2.0, 7.0] {
            assert!(log_profile_sine_argument(pt(x, 0.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn order1_examples() {
        let c = Complex64::new(0.7, -0.2);
        let data =
            CellEigenData::new(0.0, alloc::vec![TraceData::new(c, c, 0.3.into(), 0.1.into())])
                .unwrap();
        // symmetric traces at theta = 0 make l vanish; use the formulas directly
        let rot = RotationResult {
            theta: 0.0,
            a: nalgebra::DMatrix::identity(1, 1),
            rotated_traces: data.traces().to_vec(),
            standard_basis_fallback: false,
        };
        let m = matching_order1(&rot);
        assert!(m.log.plus.norm() < 1e-15 && m.log.minus.norm() < 1e-15);
        assert!((m.shift.plus - c).norm() < 1e-15 && (m.shift.minus - c).norm() < 1e-15);

        let (vp, vm) = (Complex64::new(1.2, 0.4), Complex64::new(-0.3, 0.9));
        let rot = RotationResult {
            theta: PI,
            a: nalgebra::DMatrix::identity(1, 1),
            rotated_traces: alloc::vec![TraceData::new(vp, vm, 0.0.into(), 0.0.into())],
            standard_basis_fallback: false,
        };
        let m = matching_order1(&rot);
        assert!((m.log.plus - (-vm - vp) * 0.5).norm() < 1e-15);
        assert!(m.consistency_residual(&rot) < 1e-14);
        assert!(m.phase_residual() < 1e-12);
    }

    fn two_function_rotation(theta: f64, d_plus: f64, d_minus: f64) -> RotationResult {
        RotationResult {
            theta,
            a: nalgebra::DMatrix::identity(2, 2),
            rotated_traces: alloc::vec![
                TraceData::real(1.0, 2.0, 0.5, -0.5),
                TraceData::real(1.0, 1.0, d_plus, d_minus),
            ],
            standard_basis_fallback: false,
        }
    }

    #[test]
    fn order2_examples() {
        let m = matching_order2(&two_function_rotation(0.0, 0.8, 0.8)).unwrap();
        assert!((m.dipole.minus + 0.8).norm() < 1e-15);
        assert!(m.linear.minus.norm() < 1e-15);

        let rot = two_function_rotation(0.0, 0.8, -0.8);
        let m = matching_order2(&rot).unwrap();
        assert!(m.dipole.minus.norm() < 1e-15);
        assert!(m.outer_log.minus.norm() < 1e-15);
        assert!(m.derivative_sum_residual(&rot) < 1e-14);
        assert!(m.phase_residual() < 1e-12);
    }

    #[test]
    fn solvability_reproduces_band_coefficients() {
        let data = fixtures::figure_case_1();
        let rot = rotate_basis(&data, PI).unwrap();
        let report = solvability_check(&rot).unwrap();
        assert!((report.first_order[0].re + 12.5 * PI).abs() < 1e-10);
        assert!(report.first_order[1].norm() < 1e-10);
        assert!((report.second_order.as_ref().unwrap()[1].re - PI / 800.0).abs() < 1e-10);
        assert!(report.vanishing_residual() < 1e-10);

        let v = FunctionalVectors::evaluate(&data, PI);
        assert!(report.log_coeff_residual(log_band_coeff(&v)) < 1e-10);
        let q = quadratic_band_coeff(&v).unwrap();
        assert!(report.quadratic_coeff_residual(q).unwrap() < 1e-10);
    }
}
