//! Leading band coefficients over the Brillouin zone and the band intervals
//! they generate.
//!
//! For a limiting eigenvalue `lambda0` the two leading band functions behave
//! like
//!
//! ```text
//! lambda_1(theta) ~ lambda0 + log_coeff(theta) / ln(eps)
//! lambda_2(theta) ~ lambda0 + quad_coeff(theta) * eps^2
//! ```
//!
//! with `log_coeff = -(pi/2) |L|^2` and
//! `quad_coeff = (pi/8) (|L|^2 |L'|^2 - |(L', L)|^2) / |L|^2`.
//! Since `ln(eps) < 0` both bands sit to the right of `lambda0`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};


use crate::eigendata::{CellEigenData, FunctionalVectors};
use crate::error::{Error, Result};
use crate::golden::golden_section_max;
use crate::rotation::rotate_basis;

pub const MIN_SAMPLES: usize = 16;
pub const DEFAULT_SAMPLES: usize = 1024;
pub const DEFAULT_REFINE_TOL: f64 = 1e-8;

/// Every this many grid nodes the quadratic coefficient is recomputed
/// through the rotated basis.
pub const CROSS_CHECK_STRIDE: usize = 16;
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Relative tolerance for treating two refined extrema as equal.
pub const EXTREMUM_EQUALITY_RTOL: f64 = 1e-10;

/// Extremizers closer than this (or `10 * refine_tol`, when larger) count as
/// the same point; golden-section search cannot localize a flat extremum
/// much below `sqrt(f64::EPSILON)`.
pub const EXTREMIZER_MERGE_TOL: f64 = 1e-6;

fn merge_tol(refine_tol: f64) -> f64 {
    (10.0 * refine_tol).max(EXTREMIZER_MERGE_TOL)
}

/// Coefficient of `1/ln(eps)` in the first band function.
pub fn log_band_coeff(vectors: &FunctionalVectors) -> f64 {
    -0.5 * PI * vectors.norm_sq_l()
}

/// Coefficient of `eps^2` in the second band function.
pub fn quadratic_band_coeff(vectors: &FunctionalVectors) -> Result<f64> {
    if vectors.k() < 2 {
        return Err(Error::NotApplicable(vectors.k()));
    }
    vectors.require_non_degenerate()?;
    Ok(PI / 8.0 * vectors.gram_determinant() / vectors.norm_sq_l())
}

/// Same formula, but through `(pi/8) |l'(Psi_2)|^2` of the adapted basis.
pub fn quadratic_band_coeff_via_rotation(data: &CellEigenData, theta: f64) -> Result<f64> {
    if data.multiplicity() < 2 {
        return Err(Error::NotApplicable(data.multiplicity()));
    }
    let r = rotate_basis(data, theta)?;
    Ok(PI / 8.0 * r.lp(1).norm_sqr())
}

/// Samples of both coefficients on the uniform grid `2 pi m / n`.
#[derive(Debug, Clone)]
pub struct BandCoefficients {
    pub data: CellEigenData,
    pub thetas: Vec<f64>,
    pub log_coeff: Vec<f64>,
    /// Absent when `k = 1`.
    pub quadratic_coeff: Option<Vec<f64>>,
}

impl BandCoefficients {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

pub fn sample_bands(data: &CellEigenData, n_samples: usize) -> Result<BandCoefficients> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_SAMPLES,
            got: n_samples,
        });
    }
    let k = data.multiplicity();
    let thetas: Vec<f64> = (0..n_samples)
        .map(|m| TAU * m as f64 / n_samples as f64)
        .collect();
    let mut log_coeff = Vec::with_capacity(n_samples);
    let mut quadratic = (k >= 2).then(|| Vec::with_capacity(n_samples));

    for (m, &theta) in thetas.iter().enumerate() {
        let v = FunctionalVectors::evaluate(data, theta);
        log_coeff.push(log_band_coeff(&v));
        if let Some(q) = quadratic.as_mut() {
            let value = quadratic_band_coeff(&v)?;
            if m % CROSS_CHECK_STRIDE == 0 {
                let other = quadratic_band_coeff_via_rotation(data, theta)?;
                let residual = (value - other).abs();
                if !(residual <= CROSS_CHECK_TOL * value.abs().max(1.0)) {
                    return Err(Error::ConstraintResidual { theta, residual });
                }
            }
            q.push(value);
        }
    }
    Ok(BandCoefficients {
        data: data.clone(),
        thetas,
        log_coeff,
        quadratic_coeff: quadratic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandOrder {
    /// Width of order `1/|ln eps|`.
    LogBand,
    /// Width of order `eps^2`.
    QuadraticBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumLocation {
    /// Every extremizer sits at `theta = 0`, `pi` or `2 pi`.
    EndpointsOrCenter,
    /// At least one extremizer is an interior point of the zone.
    InteriorPoints,
}

/// Edge coefficients of one band and where in the zone they are attained.
#[derive(Debug, Clone, PartialEq)]
pub struct BandInterval {
    pub order: BandOrder,
    pub lower_coeff: f64,
    pub upper_coeff: f64,
    pub arg_lower: Vec<f64>,
    pub arg_upper: Vec<f64>,
    pub classification: ExtremumLocation,
}

/// Distance from `theta` to the nearest of `0`, `pi`, `2 pi`.
pub fn distance_to_symmetric_points(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    t.abs().min((t - PI).abs()).min((t - TAU).abs())
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Global maximizers of `f`, seeded from local maxima of the periodic
/// samples and refined by golden-section search.
fn global_maximizers<F: Fn(f64) -> f64>(
    thetas: &[f64],
    samples: &[f64],
    f: &F,
    refine_tol: f64,
) -> (f64, Vec<f64>) {
    let n = samples.len();
    let h = TAU / n as f64;
    let mut refined: Vec<(f64, f64)> = Vec::new();
    for m in 0..n {
        let prev = samples[(m + n - 1) % n];
        let next = samples[(m + 1) % n];
        if samples[m] >= prev && samples[m] >= next {
            let (x, fx) = golden_section_max(f, thetas[m] - h, thetas[m] + h, refine_tol);
            refined.push((x.rem_euclid(TAU), fx));
        }
    }
    let best = refined
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = samples.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = EXTREMUM_EQUALITY_RTOL * best.abs().max(scale).max(f64::MIN_POSITIVE);

    let mut args: Vec<f64> = Vec::new();
    for &(x, v) in &refined {
        if best - v <= tol && args.iter().all(|&a| circular_distance(a, x) > merge_tol(refine_tol))
        {
            args.push(x);
        }
    }
    args.sort_by(|a, b| a.total_cmp(b));
    (best, args)
}

fn interval_from<F: Fn(f64) -> f64>(
    order: BandOrder,
    thetas: &[f64],
    samples: &[f64],
    f: F,
    refine_tol: f64,
    // lower edge coefficient comes from the maximum of `f` when true
    lower_from_max: bool,
) -> BandInterval {
    let (fmax, argmax) = global_maximizers(thetas, samples, &f, refine_tol);
    let negated: Vec<f64> = samples.iter().map(|v| -v).collect();
    let g = |t: f64| -f(t);
    let (neg_min, argmin) = global_maximizers(thetas, &negated, &g, refine_tol);
    let fmin = -neg_min;

    let (lower_coeff, upper_coeff, arg_lower, arg_upper) = if lower_from_max {
        (-fmax, -fmin, argmax, argmin)
    } else {
        (fmin, fmax, argmin, argmax)
    };
    let interior = arg_lower
        .iter()
        .chain(&arg_upper)
        .any(|&t| distance_to_symmetric_points(t) > merge_tol(refine_tol));
    BandInterval {
        order,
        lower_coeff,
        upper_coeff,
        arg_lower,
        arg_upper,
        classification: if interior {
            ExtremumLocation::InteriorPoints
        } else {
            ExtremumLocation::EndpointsOrCenter
        },
    }
}

/// Extracts the log band (and, for `k >= 2`, the quadratic band) with
/// refined extremizers.
///
/// Log band: `Lambda_1^- = -max log_coeff`, `Lambda_1^+ = -min log_coeff`.
/// Quadratic band: `Lambda_2^- = min quad_coeff`, `Lambda_2^+ = max`.
pub fn band_intervals(coeffs: &BandCoefficients, refine_tol: f64) -> Vec<BandInterval> {
    let data = &coeffs.data;
    let mut out = Vec::with_capacity(2);
    out.push(interval_from(
        BandOrder::LogBand,
        &coeffs.thetas,
        &coeffs.log_coeff,
        |t| log_band_coeff(&FunctionalVectors::evaluate(data, t)),
        refine_tol,
        true,
    ));
    if let Some(q) = &coeffs.quadratic_coeff {
        out.push(interval_from(
            BandOrder::QuadraticBand,
            &coeffs.thetas,
            q,
            |t| {
                let v = FunctionalVectors::evaluate(data, t);
                PI / 8.0 * v.gram_determinant() / v.norm_sq_l()
            },
            refine_tol,
            false,
        ));
    }
    out
}

/// Leading-order band positions at a concrete window size.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEdges {
    pub epsilon: f64,
    pub lambda0: f64,
    /// `[lambda0 + Lambda_1^- / |ln eps|, lambda0 + Lambda_1^+ / |ln eps|]`.
    pub log_band: [f64; 2],
    /// `[lambda0 + Lambda_2^- eps^2, lambda0 + Lambda_2^+ eps^2]`.
    pub quadratic_band: Option<[f64; 2]>,
    /// Lower edge of the log band minus upper edge of the quadratic band.
    pub gap: Option<f64>,
    pub disjoint: bool,
    /// Leading-order bands are disjoint for every `eps` below this value.
    pub disjoint_below: Option<f64>,
}

impl BandEdges {
    pub fn ensure_disjoint(&self) -> Result<()> {
        if self.disjoint {
            Ok(())
        } else {
            Err(Error::BandsOverlap {
                epsilon: self.epsilon,
                overlap: -self.gap.unwrap_or(0.0),
            })
        }
    }
}

/// Smallest `eps` in `(0, 1)` where `a / |ln eps| - b eps^2` stops being
/// positive, or `1` when it never does.
fn disjointness_threshold(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let g = |eps: f64| a / eps.ln().abs() - b * eps * eps;
    const STEPS: usize = 2400;
    let mut prev = 1e-12;
    for i in 1..STEPS {
        let eps = 10f64.powf(-12.0 + 12.0 * i as f64 / STEPS as f64);
        if g(eps) <= 0.0 {
            let (mut lo, mut hi) = (prev, eps);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
        prev = eps;
    }
    1.0
}

pub fn band_edges_at_epsilon(
    intervals: &[BandInterval],
    lambda0: f64,
    epsilon: f64,
) -> Result<BandEdges> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let inv_log = 1.0 / epsilon.ln().abs();
    let log = intervals
        .iter()
        .find(|b| b.order == BandOrder::LogBand)
        .expect("log band interval is always present");
    let log_band = [
        lambda0 + log.lower_coeff * inv_log,
        lambda0 + log.upper_coeff * inv_log,
    ];
    let quad = intervals
        .iter()
        .find(|b| b.order == BandOrder::QuadraticBand);
    let eps2 = epsilon * epsilon;
    let quadratic_band =
        quad.map(|q| [lambda0 + q.lower_coeff * eps2, lambda0 + q.upper_coeff * eps2]);
    let gap = quadratic_band.map(|qb| log_band[0] - qb[1]);
    let disjoint_below =
        quad.map(|q| disjointness_threshold(log.lower_coeff, q.upper_coeff));
    Ok(BandEdges {
        epsilon,
        lambda0,
        log_band,
        quadratic_band,
        gap,
        disjoint: gap.is_none_or(|g| g > 0.0),
        disjoint_below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigendata::functional_vectors;
    use crate::fixtures;

    #[test]
    fn log_coeff_examples() {
        let data = fixtures::figure_case_1();
        let v = functional_vectors(&data, PI).unwrap();
        assert!((log_band_coeff(&v) + 12.5 * PI).abs() < 1e-12);

        let area = 0.8;
        let constant = fixtures::constant_mode(area, 0.0);
        assert_eq!(
            log_band_coeff(&FunctionalVectors::evaluate(&constant, 0.0)),
            0.0
        );
        for theta in [0.5, 1.7, PI, 5.0] {
            let got = log_band_coeff(&FunctionalVectors::evaluate(&constant, theta));
            assert!((got + PI * (1.0 - theta.cos()) / area).abs() < 1e-13);
        }
    }

    #[test]
    fn quadratic_coeff_examples() {
        let data = fixtures::figure_case_1();
        let at_pi = quadratic_band_coeff(&functional_vectors(&data, PI).unwrap()).unwrap();
        assert!((at_pi - PI / 800.0).abs() < 1e-14);
        let at_zero = quadratic_band_coeff(&functional_vectors(&data, 0.0).unwrap()).unwrap();
        assert!((at_zero - PI / 8.0 * 30.25 / 5.0).abs() < 1e-13);
        assert!(matches!(
            quadratic_band_coeff(&FunctionalVectors::evaluate(
                &fixtures::constant_mode(1.0, 0.0),
                1.0
            )),
            Err(Error::NotApplicable(1))
        ));
    }

    #[test]
    fn sample_bands_rejects_coarse_grid() {
        let data = fixtures::figure_case_1();
        assert!(matches!(
            sample_bands(&data, 8),
            Err(Error::TooFewSamples { min: 16, got: 8 })
        ));
        let b = sample_bands(&data, 16).unwrap();
        assert!(b.log_coeff.iter().all(|v| v.is_finite()));
        assert!(b.quadratic_coeff.unwrap().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn first_list_has_endpoint_extrema() {
        let b = sample_bands(&fixtures::figure_case_1(), 1024).unwrap();
        let iv = band_intervals(&b, DEFAULT_REFINE_TOL);
        assert_eq!(iv.len(), 2);
        for band in &iv {
            assert_eq!(band.classification, ExtremumLocation::EndpointsOrCenter);
            assert!(band.lower_coeff <= band.upper_coeff);
        }
        let log = &iv[0];
        assert!((log.lower_coeff - 2.5 * PI).abs() < 1e-12);
        assert!((log.upper_coeff - 12.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn edges_and_gap() {
        let b = sample_bands(&fixtures::figure_case_1(), 1024).unwrap();
        let iv = band_intervals(&b, DEFAULT_REFINE_TOL);
        let edges = band_edges_at_epsilon(&iv, 3.0, 1e-3).unwrap();
        let expected = 2.5 * PI / 1e-3f64.ln().abs() - PI / 8.0 * 30.25 / 5.0 * 1e-6;
        assert!((edges.gap.unwrap() - expected).abs() < 1e-12);
        assert!(edges.disjoint);
        assert!(edges.ensure_disjoint().is_ok());
        assert!(band_edges_at_epsilon(&iv, 3.0, 1.5).is_err());
    }

    #[test]
    fn threshold_detects_overlap() {
        // a / |ln eps| = b eps^2 has a root in (0, 1) when b is large
        let t = disjointness_threshold(1.0, 1e4);
        assert!(t > 0.0 && t < 1.0);
        let g = |e: f64| 1.0 / e.ln().abs() - 1e4 * e * e;
        assert!(g(0.999 * t) > 0.0);
        assert!(g(1.001 * t) <= 0.0);
        assert_eq!(disjointness_threshold(1.0, 1e-3), 1.0);
    }
}
