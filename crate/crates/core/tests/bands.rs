use std::f64::consts::{PI, TAU};

use windowband_core::bands::{distance_to_symmetric_points, DEFAULT_REFINE_TOL};
use windowband_core::fixtures::{constant_mode, DerivativeConvention, FigureCase};
use windowband_core::{
    band_edges_at_epsilon, band_intervals, sample_bands, BandOrder, ExtremumLocation,
};

fn quadratic(case: FigureCase, convention: DerivativeConvention) -> windowband_core::BandInterval {
    let b = sample_bands(&case.data_with(convention), 1024).unwrap();
    band_intervals(&b, DEFAULT_REFINE_TOL)
        .into_iter()
        .find(|i| i.order == BandOrder::QuadraticBand)
        .unwrap()
}

#[test]
fn first_list_extrema_at_symmetric_points() {
    let q = quadratic(FigureCase::One, DerivativeConvention::AlongX2);
    assert_eq!(q.classification, ExtremumLocation::EndpointsOrCenter);
    assert_eq!(q.arg_lower.len(), 1);
    assert!((q.arg_lower[0] - PI).abs() < 1e-6);
    assert!((q.lower_coeff - PI / 800.0).abs() < 1e-12);
    assert!(distance_to_symmetric_points(q.arg_upper[0]) < 1e-6);
    assert!((q.upper_coeff - PI / 8.0 * 30.25 / 5.0).abs() < 1e-12);
}

#[test]
fn second_list_under_both_derivative_readings() {
    // d psi/dx2 reading: the coefficient is monotone in cos(theta)
    let q = quadratic(FigureCase::Two, DerivativeConvention::AlongX2);
    assert_eq!(q.classification, ExtremumLocation::EndpointsOrCenter);
    assert!(distance_to_symmetric_points(q.arg_upper[0]) < 1e-6);

    // inner tangential reading: two maximizers placed symmetrically about pi
    let q = quadratic(FigureCase::Two, DerivativeConvention::InnerTangent);
    assert_eq!(q.classification, ExtremumLocation::InteriorPoints);
    assert_eq!(q.arg_upper.len(), 2);
    assert!((q.arg_upper[0] + q.arg_upper[1] - TAU).abs() < 1e-6);
    assert!((q.arg_upper[0] - 1.8598).abs() < 1e-3);
}

#[test]
fn log_band_extrema_are_symmetric_points() {
    for case in [FigureCase::One, FigureCase::Two] {
        let b = sample_bands(&case.data(), 1024).unwrap();
        let log = &band_intervals(&b, DEFAULT_REFINE_TOL)[0];
        assert_eq!(log.classification, ExtremumLocation::EndpointsOrCenter);
        assert!(log.lower_coeff > 0.0);
        assert!(log.lower_coeff <= log.upper_coeff);
    }
}

#[test]
fn constant_mode_closed_form() {
    let area = 0.8;
    let b = sample_bands(&constant_mode(area, 0.0), 512).unwrap();
    assert!(b.quadratic_coeff.is_none());
    for (t, v) in b.thetas.iter().zip(&b.log_coeff) {
        assert!((v + PI * (1.0 - t.cos()) / area).abs() < 1e-12);
    }
}

#[test]
fn relative_gap_grows_as_window_shrinks() {
    let b = sample_bands(&FigureCase::One.data(), 1024).unwrap();
    let iv = band_intervals(&b, DEFAULT_REFINE_TOL);
    let log_lower = iv[0].lower_coeff;
    let mut previous = 0.0;
    for eps in [1e-2, 1e-3, 1e-4] {
        let edges = band_edges_at_epsilon(&iv, 0.0, eps).unwrap();
        let gap = edges.gap.unwrap();
        assert!(gap > 0.0);
        let relative = gap * eps.ln().abs() / log_lower;
        assert!(relative > previous && relative < 1.0);
        previous = relative;
        assert!(eps < edges.disjoint_below.unwrap());
    }
}
