use std::f64::consts::PI;

use proptest::prelude::*;
use windowband_solvers::cell::{cell_eigendata, DEFAULT_CLUSTER_TOL, DEFAULT_SEED};
use windowband_solvers::floquet::{assemble_windowed, eigen_near};
use windowband_solvers::sweep::{rate_sweep, sweep, MeshPlan, SweepSpec};
use windowband_solvers::{CellSpec, Potential, Refinement, SolverError, WindowedSpec};

fn cell() -> CellSpec {
    CellSpec::uniform(1.0, 24, 48, Potential::separable_cosine(5.0, 1.0, 0.5)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn windowed_operator_is_exactly_hermitian(theta in 0.0..2.0 * PI, eps in 0.13..0.45f64) {
        let spec = WindowedSpec::new(cell(), eps, theta).unwrap();
        let op = assemble_windowed(&spec).unwrap();
        prop_assert_eq!(op.matrix.hermitian_defect(), 0.0);
        let glued = spec.window_mask().iter().filter(|w| **w).count();
        prop_assert_eq!(op.dofs(), spec.base.mesh.len() - glued);
    }

    #[test]
    fn conjugate_quasi_momenta_share_eigenvalues(theta in 0.05..PI - 0.05, eps in 0.13..0.3f64) {
        let base = cell();
        let a = eigen_near(&WindowedSpec::new(base.clone(), eps, theta).unwrap(), -0.6, 3, 1).unwrap();
        let b = eigen_near(&WindowedSpec::new(base, eps, 2.0 * PI - theta).unwrap(), -0.6, 3, 1).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn tracked_eigenvalues_lie_right_of_lambda0() {
    let base = cell();
    let (data, _) = cell_eigendata(&base, 4, None, DEFAULT_CLUSTER_TOL, DEFAULT_SEED).unwrap();
    for theta in [0.0, 1.0, PI / 2.0, PI, 5.0] {
        let r = eigen_near(&WindowedSpec::new(base.clone(), 0.15, theta).unwrap(), data.lambda0(), 1, 3).unwrap();
        assert!(r.min_offset() > -1e-9, "theta {theta}: {}", r.min_offset());
        assert!(r.residuals.iter().all(|v| *v < 1e-8));
        assert!(r.r2.is_none() && r.r3.is_empty());
    }
}

#[test]
fn symmetric_cell_at_zero_momentum_has_no_log_term() {
    let mut spec = SweepSpec::new(
        1.0,
        Potential::separable_cosine(5.0, 0.0, 0.5),
        vec![0.08, 0.04, 0.02],
        vec![0.0],
        1,
    );
    spec.mesh = MeshPlan::Graded(Refinement {
        core_intervals: 6,
        h_max: 1.0 / 24.0,
        growth: 1.2,
    });
    let reports = rate_sweep(&spec).unwrap();
    assert!(reports[0].prediction_vanishes);
    assert!(reports[0].points.iter().all(|p| p.result.r1.abs() < 1e-7));
}

#[test]
fn k1_sweep_reports_and_trend_failure_carries_data() {
    let mut spec = SweepSpec::new(
        1.0,
        Potential::separable_cosine(5.0, 1.0, 0.5),
        vec![0.08, 0.04, 0.02],
        vec![PI / 2.0],
        1,
    );
    spec.mesh = MeshPlan::Graded(Refinement {
        core_intervals: 6,
        h_max: 1.0 / 24.0,
        growth: 1.2,
    });
    let reports = sweep(&spec).unwrap();
    let r = &reports[0];
    assert_eq!(r.points.len(), 3);
    assert!(r.points.windows(2).all(|w| w[0].epsilon > w[1].epsilon));
    assert!(r.ratio1().iter().all(|v| *v > 0.0));
    assert!(r.ratio1_limit.is_some());

    spec.tolerance = 1e-9;
    match rate_sweep(&spec) {
        Err(SolverError::TrendViolation(data)) => assert_eq!(data[0].points.len(), 3),
        other => panic!("expected a trend violation, got {other:?}"),
    }
}

#[test]
fn unresolved_window_is_rejected() {
    assert!(matches!(
        WindowedSpec::new(cell(), 0.05, 1.0),
        Err(SolverError::ResolutionError { required: 6, .. })
    ));
}

#[test]
fn uniform_plan_cannot_resolve_small_windows() {
    let mut spec = SweepSpec::new(1.0, Potential::separable_cosine(5.0, 1.0, 0.5), vec![0.2, 0.1, 0.05], vec![1.0], 1);
    spec.mesh = MeshPlan::Uniform { nx: 24, ny: 48 };
    assert!(matches!(sweep(&spec), Err(SolverError::ResolutionError { .. })));
}
