//! Numerical property checks for the inner profiles and fields.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    dipole_far_field_residual, dipole_profile, log_far_field_residual, log_profile,
    log_profile_sine_argument, InnerPoint, LogMatching, Side, FLUX_STEP,
};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub expected: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InnerLayerReport {
    pub checks: Vec<CheckOutcome>,
}

impl InnerLayerReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, value: f64, expected: &'static str, passed: bool) {
        self.checks.push(CheckOutcome {
            name,
            value,
            expected,
            passed,
        });
    }
}

pub const HARMONICITY_STEPS: [f64; 3] = [0.02, 0.01, 0.005];
pub const HARMONICITY_POINTS: [(f64, f64); 4] = [(0.3, 0.8), (1.7, 0.6), (-2.5, 1.5), (0.4, 3.0)];
pub const FAR_FIELD_RADII: [f64; 3] = [10.0, 20.0, 40.0];
/// Polar angle for far-field samples; the dipole residual's leading term
/// vanishes on the imaginary axis.
pub const FAR_FIELD_ANGLE: f64 = core::f64::consts::FRAC_PI_3;

fn at(xi1: f64, xi2: f64) -> InnerPoint {
    InnerPoint { xi1, xi2 }
}

/// Five-point Laplacian of `f` at `(x, y)`; needs `y > h`.
pub fn discrete_laplacian<F: Fn(InnerPoint) -> f64>(f: &F, x: f64, y: f64, h: f64) -> f64 {
    (f(at(x + h, y)) + f(at(x - h, y)) + f(at(x, y + h)) + f(at(x, y - h)) - 4.0 * f(at(x, y)))
        / (h * h)
}

/// Observed convergence orders of the discrete Laplacian between
/// consecutive steps of [`HARMONICITY_STEPS`], over all sample points.
pub fn harmonicity_orders<F: Fn(InnerPoint) -> f64>(f: &F) -> Vec<f64> {
    let mut orders = Vec::new();
    for &(x, y) in &HARMONICITY_POINTS {
        let res: Vec<f64> = HARMONICITY_STEPS
            .iter()
            .map(|&h| discrete_laplacian(f, x, y, h).abs())
            .collect();
        for w in res.windows(2).zip(HARMONICITY_STEPS.windows(2)) {
            let (r, h) = w;
            orders.push(libm::log(r[0] / r[1]) / libm::log(h[0] / h[1]));
        }
    }
    orders
}

/// Largest `|f|` on sample points of the window.
pub fn window_dirichlet_residual<F: Fn(InnerPoint) -> f64>(f: &F) -> f64 {
    (0..=40)
        .map(|i| -0.975 + 1.95 * i as f64 / 40.0)
        .map(|x| f(at(x, 0.0)).abs())
        .fold(0.0, f64::max)
}

/// Largest forward difference `|f(x, h) - f(x, 0)| / h` over sample points
/// outside the window.
pub fn outside_neumann_residual<F: Fn(InnerPoint) -> f64>(f: &F, h: f64) -> f64 {
    [-4.0, -2.5, -1.5, 1.5, 2.0, 3.0, 5.0]
        .iter()
        .map(|&x| ((f(at(x, h)) - f(at(x, 0.0))) / h).abs())
        .fold(0.0, f64::max)
}

/// Residuals at the radii of [`FAR_FIELD_RADII`] along [`FAR_FIELD_ANGLE`].
pub fn far_field_residuals<F: Fn(InnerPoint) -> f64>(residual: &F) -> [f64; 3] {
    FAR_FIELD_RADII.map(|r| {
        residual(at(
            r * libm::cos(FAR_FIELD_ANGLE),
            r * libm::sin(FAR_FIELD_ANGLE),
        ))
        .abs()
    })
}

/// Largest jump of `f` across the vertical lines `xi1 = +-1` at small height.
pub fn endpoint_jump<F: Fn(InnerPoint) -> f64>(f: &F) -> f64 {
    let (y, d) = (1e-3, 1e-9);
    [-1.0, 1.0]
        .iter()
        .map(|&x| (f(at(x - d, y)) - f(at(x + d, y))).abs())
        .fold(0.0, f64::max)
}

/// `d/dxi2` at `p` by central differences, or a second-order one-sided
/// stencil when `p` is within one step of the boundary.
pub fn normal_derivative<F: Fn(InnerPoint) -> Complex64>(f: &F, p: InnerPoint) -> Complex64 {
    let h = FLUX_STEP;
    if p.xi2 >= h {
        (f(at(p.xi1, p.xi2 + h)) - f(at(p.xi1, p.xi2 - h))) / (2.0 * h)
    } else {
        (f(at(p.xi1, p.xi2 + 2.0 * h)) * -1.0 + f(at(p.xi1, p.xi2 + h)) * 4.0
            - f(p) * 3.0)
            / (2.0 * h)
    }
}

/// Residuals of the quasi-periodic gluing of the leading inner fields on the
/// window: values `F+ = e^{i theta} F-` and fluxes `dF+ = -e^{i theta} dF-`.
pub fn window_gluing_residuals(m: &LogMatching, epsilon: f64) -> (f64, f64) {
    let phase = Complex64::from_polar(1.0, m.theta);
    let mut value: f64 = 0.0;
    let mut flux: f64 = 0.0;
    for x in [-0.6, -0.2, 0.0, 0.3, 0.7] {
        let p = at(x, 0.0);
        let fp = m.inner_field(p, Side::Plus, epsilon);
        let fm = m.inner_field(p, Side::Minus, epsilon);
        value = value.max((fp - phase * fm).norm());
        let dp = normal_derivative(&|q| m.inner_field(q, Side::Plus, epsilon), p);
        let dm = normal_derivative(&|q| m.inner_field(q, Side::Minus, epsilon), p);
        flux = flux.max((dp + phase * dm).norm());
    }
    (value, flux)
}

/// Runs every profile check.
pub fn verify_profiles() -> InnerLayerReport {
    let mut report = InnerLayerReport::default();

    for (name, f) in [
        ("log profile harmonicity order", log_profile as fn(InnerPoint) -> f64),
        ("dipole profile harmonicity order", dipole_profile),
    ] {
        let orders = harmonicity_orders(&f);
        let worst = orders
            .iter()
            .copied()
            .fold(2.0, |acc: f64, o| if (o - 2.0).abs() > (acc - 2.0).abs() { o } else { acc });
        report.push(name, worst, "2.0 +- 0.2", (worst - 2.0).abs() <= 0.2);
    }

    let dirichlet =
        window_dirichlet_residual(&log_profile).max(window_dirichlet_residual(&dipole_profile));
    report.push("window Dirichlet residual", dirichlet, "< 1e-12", dirichlet < 1e-12);

    for (name, f) in [
        ("log profile Neumann order", log_profile as fn(InnerPoint) -> f64),
        ("dipole profile Neumann order", dipole_profile),
    ] {
        let coarse = outside_neumann_residual(&f, 1e-2);
        let fine = outside_neumann_residual(&f, 1e-3);
        let order = libm::log10(coarse / fine);
        let passed = fine < 1e-12 || order >= 0.9;
        report.push(name, order, ">= 1 (or residual below 1e-12)", passed);
    }

    let log_far = far_field_residuals(&log_far_field_residual);
    let ratio = log_far[0] / log_far[2];
    report.push(
        "log profile far-field ratio r=10/r=40",
        ratio,
        "about 16",
        (ratio / 16.0 - 1.0).abs() < 0.1,
    );
    let dipole_far = far_field_residuals(&dipole_far_field_residual);
    let ratio = dipole_far[0] / dipole_far[2];
    report.push(
        "dipole profile far-field ratio r=10/r=40",
        ratio,
        ">= 16",
        ratio >= 16.0 * 0.9,
    );

    let jump = endpoint_jump(&log_profile).max(endpoint_jump(&dipole_profile));
    report.push("continuity across window endpoints", jump, "< 1e-6", jump < 1e-6);

    let sine = outside_neumann_residual(&log_profile_sine_argument, 1e-4);
    report.push(
        "sine-argument variant violates Neumann outside window",
        sine,
        "> 1e-2",
        sine > 1e-2,
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::matching_order1;
    use crate::rotation::rotate_basis;
    use crate::fixtures;

    #[test]
    fn profile_checks_pass() {
        let report = verify_profiles();
        for c in &report.checks {
            assert!(c.passed, "{} = {} (expected {})", c.name, c.value, c.expected);
        }
    }

    #[test]
    fn gluing_on_window() {
        for theta in [0.3, 1.0, 2.5, 4.0] {
            let rot = rotate_basis(&fixtures::figure_case_1(), theta).unwrap();
            let m = matching_order1(&rot);
            let (value, flux) = window_gluing_residuals(&m, 1e-3);
            assert!(value < 1e-12);
            // truncation of the one-sided stencil at the flux step
            assert!(flux < 1e-6, "flux residual {flux}");
        }
    }
}
