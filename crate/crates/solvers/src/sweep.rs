//! Window-width sweeps comparing computed eigenvalues with the leading band
//! coefficients of the limiting cell.

use rayon::prelude::*;
use windowband_core::{log_band_coeff, quadratic_band_coeff, CellEigenData, FunctionalVectors};

use crate::cell::{cell_eigendata, tune_degeneracy, CellSpec, TuneOptions, DEFAULT_CLUSTER_TOL};
use crate::error::{Result, SolverError};
use crate::floquet::{eigen_near, FloquetResult, WindowedSpec};
use crate::mesh::{Mesh, Refinement};
use crate::potential::Potential;

/// Predictions below this fraction of the trace scale count as zero.
pub const VANISHING_PREDICTION_RTOL: f64 = 1e-10;

/// Relative eigenvalue offsets treated as zero.
pub const ROUNDOFF_OFFSET: f64 = 1e-8;

/// How each window width gets its mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshPlan {
    /// Graded toward the junction points, refined with the window.
    Graded(Refinement),
    /// One uniform mesh for every width.
    Uniform { nx: usize, ny: usize },
}

impl MeshPlan {
    pub fn mesh(&self, height: f64, epsilon: f64) -> Result<Mesh> {
        match *self {
            Self::Graded(r) => Mesh::for_window(height, epsilon, &r),
            Self::Uniform { nx, ny } => Mesh::uniform(height, nx, ny),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub height: f64,
    pub potential: Potential,
    pub epsilons: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Multiplicity of the tracked cell eigenvalue.
    pub k: usize,
    pub mesh: MeshPlan,
    /// Cell eigenvalue to follow; the lowest one if absent.
    pub lambda0_hint: Option<f64>,
    /// Manufacture a double eigenvalue by varying the potential amplitude.
    pub tune: Option<TuneOptions>,
    /// Allowed distance of the extrapolated primary ratio from 1.
    pub tolerance: f64,
    pub num_modes: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(height: f64, potential: Potential, epsilons: Vec<f64>, thetas: Vec<f64>, k: usize) -> Self {
        Self {
            height,
            potential,
            epsilons,
            thetas,
            k,
            mesh: MeshPlan::Graded(Refinement::default()),
            lambda0_hint: None,
            tune: None,
            tolerance: 0.1,
            num_modes: 6,
            seed: crate::cell::DEFAULT_SEED,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilons.len() < 3 {
            return Err(SolverError::InvalidSweep(format!(
                "need at least three window widths, got {}",
                self.epsilons.len()
            )));
        }
        if self.thetas.is_empty() {
            return Err(SolverError::InvalidSweep("no quasi-momenta given".into()));
        }
        if self.k == 0 || (self.tune.is_some() && self.k != 2) {
            return Err(SolverError::InvalidSweep(format!(
                "multiplicity {} does not fit the requested cell",
                self.k
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(SolverError::InvalidSweep("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub dofs: usize,
    /// Tuned amplitude, when the cell was tuned.
    pub parameter: Option<f64>,
    pub result: FloquetResult,
    /// Limit of `r1`, which is minus the log-band coefficient.
    pub log_prediction: f64,
    /// Limit of `r2`.
    pub quadratic_prediction: Option<f64>,
    pub ratio1: f64,
    pub ratio2: Option<f64>,
    /// `(lambda^(2) - lambda0) / (lambda^(1) - lambda0)`.
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub theta: f64,
    pub k: usize,
    /// Ordered by decreasing window width.
    pub points: Vec<SweepPoint>,
    pub prediction_vanishes: bool,
    pub ratio1_limit: Option<f64>,
    pub ratio2_limit: Option<f64>,
    pub ratio1_monotone: bool,
    pub ratio2_monotone: Option<bool>,
    pub separation_decreasing: Option<bool>,
    pub checks: Vec<TrendCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendCheck {
    pub name: String,
    pub passed: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn ratio1(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ratio1).collect()
    }

    pub fn ratio2(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.ratio2).collect()
    }

    pub fn separation(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.separation).collect()
    }
}

/// Value at `x = 0` of the interpolating polynomial through the points.
pub fn richardson(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (a, b) = (xs[i], xs[i + level]);
            p[i] = (a * p[i + 1] - b * p[i]) / (a - b);
        }
    }
    p[0]
}

/// `|ratio - 1|` strictly decreasing and no sign change across 1.
fn approaches_one(values: &[f64]) -> bool {
    values.windows(2).all(|w| {
        (w[1] - 1.0).abs() < (w[0] - 1.0).abs() && (w[1] - 1.0).signum() == (w[0] - 1.0).signum()
    })
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

struct CellAtWidth {
    data: CellEigenData,
    parameter: Option<f64>,
    spec: CellSpec,
}

fn cell_at_width(spec: &SweepSpec, epsilon: f64) -> Result<CellAtWidth> {
    let mesh = spec.mesh.mesh(spec.height, epsilon)?;
    match &spec.tune {
        Some(opts) => {
            let family = |t: f64| CellSpec::new(mesh.clone(), spec.potential.with_amplitude(t));
            let tuned = tune_degeneracy(family, opts)?;
            Ok(CellAtWidth {
                data: tuned.data,
                parameter: Some(tuned.parameter),
                spec: tuned.spec,
            })
        }
        None => {
            let cell = CellSpec::new(mesh, spec.potential)?;
            let (data, _) =
                cell_eigendata(&cell, spec.num_modes, spec.lambda0_hint, DEFAULT_CLUSTER_TOL, spec.seed)?;
            if data.multiplicity() != spec.k {
                return Err(SolverError::InvalidSweep(format!(
                    "cell eigenvalue {} has multiplicity {}, expected {}",
                    data.lambda0(),
                    data.multiplicity(),
                    spec.k
                )));
            }
            Ok(CellAtWidth {
                data,
                parameter: None,
                spec: cell,
            })
        }
    }
}

fn point(spec: &SweepSpec, cell: &CellAtWidth, epsilon: f64, theta: f64) -> Result<SweepPoint> {
    let windowed = WindowedSpec::new(cell.spec.clone(), epsilon, theta)?;
    let dofs = cell.spec.mesh.len() - windowed.window_mask().iter().filter(|w| **w).count();
    let result = eigen_near(&windowed, cell.data.lambda0(), spec.k, spec.seed)?;
    let vectors = FunctionalVectors::evaluate(&cell.data, theta);
    let log_prediction = -log_band_coeff(&vectors);
    let quadratic_prediction = quadratic_band_coeff(&vectors).ok();
    let b = result.branches();
    let separation = b
        .get(1)
        .map(|l2| (l2 - result.lambda0) / (b[0] - result.lambda0));
    Ok(SweepPoint {
        epsilon,
        dofs,
        parameter: cell.parameter,
        ratio1: result.r1 / log_prediction,
        ratio2: result.r2.zip(quadratic_prediction).map(|(r, q)| r / q),
        log_prediction,
        quadratic_prediction,
        separation,
        result,
    })
}

fn report(spec: &SweepSpec, theta: f64, points: Vec<SweepPoint>, scale: f64) -> SweepReport {
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.epsilon.ln().abs()).collect();
    let mut checks = Vec::new();
    let mut check = |name: String, passed: bool| checks.push(TrendCheck { name, passed });

    let offset = points
        .iter()
        .map(|p| p.result.min_offset() / (1.0 + p.result.lambda0.abs()))
        .fold(f64::INFINITY, f64::min);
    check(
        format!("tracked eigenvalues lie right of lambda0 (worst relative offset {offset:.3e})"),
        offset > -ROUNDOFF_OFFSET,
    );

    let prediction_vanishes = points
        .iter()
        .any(|p| p.log_prediction <= VANISHING_PREDICTION_RTOL * scale);
    let (ratio1_limit, ratio1_monotone) = if prediction_vanishes {
        let r1: Vec<f64> = points.iter().map(|p| p.result.r1.abs()).collect();
        let floor = points
            .iter()
            .map(|p| ROUNDOFF_OFFSET * (1.0 + p.result.lambda0.abs()))
            .fold(0.0, f64::max);
        let ok = r1.iter().all(|r| *r < floor) || strictly_decreasing(&r1);
        check(format!("r1 {} decays with a vanishing log coefficient", sci(&r1)), ok);
        (None, ok)
    } else {
        let r: Vec<f64> = points.iter().map(|p| p.ratio1).collect();
        let limit = richardson(&xs, &r);
        let ok = approaches_one(&r) && r.iter().all(|v| *v > 0.0);
        check(format!("r1 ratios {r:.4?} positive and monotone toward 1"), ok);
        if spec.k == 1 {
            check(
                format!("extrapolated r1 ratio {limit:.4} within {} of 1", spec.tolerance),
                (limit - 1.0).abs() <= spec.tolerance,
            );
        }
        (Some(limit), ok)
    };

    let mut ratio2_limit = None;
    let mut ratio2_monotone = None;
    let mut separation_decreasing = None;
    if spec.k >= 2 {
        match points.iter().map(|p| p.ratio2).collect::<Option<Vec<f64>>>() {
            Some(r) => {
                let limit = richardson(&xs, &r);
                let ok = approaches_one(&r);
                check(format!("r2 ratios {r:.4?} monotone toward 1"), ok);
                check(
                    format!("extrapolated r2 ratio {limit:.4} within {} of 1", spec.tolerance),
                    (limit - 1.0).abs() <= spec.tolerance,
                );
                ratio2_limit = Some(limit);
                ratio2_monotone = Some(ok);
            }
            None => check("quadratic coefficient available".into(), false),
        }
        if let Some(s) = points.iter().map(|p| p.separation).collect::<Option<Vec<f64>>>() {
            let ok = strictly_decreasing(&s) && s.iter().all(|v| *v >= 0.0);
            check(format!("band separation {} shrinks", sci(&s)), ok);
            separation_decreasing = Some(ok);
        }
    }

    SweepReport {
        theta,
        k: spec.k,
        points,
        prediction_vanishes,
        ratio1_limit,
        ratio2_limit,
        ratio1_monotone,
        ratio2_monotone,
        separation_decreasing,
        checks,
    }
}

/// Runs every `(eps, theta)` solve and checks the convergence trends.
///
/// Cell data and predictions are recomputed on each window-resolving mesh so
/// discretization error largely cancels in `lambda - lambda0`.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepReport>> {
    spec.validate()?;
    let mut epsilons = spec.epsilons.clone();
    epsilons.sort_by(|a, b| b.total_cmp(a));

    let per_width: Vec<(Vec<SweepPoint>, f64)> = epsilons
        .par_iter()
        .map(|&eps| {
            let cell = cell_at_width(spec, eps)?;
            let points = spec
                .thetas
                .par_iter()
                .map(|&theta| point(spec, &cell, eps, theta))
                .collect::<Result<Vec<_>>>()?;
            Ok((points, cell.data.value_scale()))
        })
        .collect::<Result<_>>()?;

    let scale = per_width.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(spec
        .thetas
        .iter()
        .enumerate()
        .map(|(t, &theta)| {
            let points = per_width.iter().map(|(pts, _)| pts[t].clone()).collect();
            report(spec, theta, points, scale * scale)
        })
        .collect())
}

/// [`sweep`], failing with the full data if any trend check fails.
pub fn rate_sweep(spec: &SweepSpec) -> Result<Vec<SweepReport>> {
    let reports = sweep(spec)?;
    if reports.iter().all(SweepReport::passed) {
        Ok(reports)
    } else {
        Err(SolverError::TrendViolation(Box::new(reports)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_exact_on_quadratics() {
        let f = |x: f64| 0.9 + 2.0 * x - 3.0 * x * x;
        let xs = [0.4, 0.3, 0.25];
        let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
        assert!((richardson(&xs, &ys) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn monotone_approach() {
        assert!(approaches_one(&[1.3, 1.2, 1.05]));
        assert!(approaches_one(&[0.5, 0.8, 0.9]));
        assert!(!approaches_one(&[1.3, 0.9, 0.95]));
        assert!(!approaches_one(&[1.1, 1.2, 1.05]));
    }

    #[test]
    fn too_few_widths_rejected() {
        let s = SweepSpec::new(1.0, Potential::Zero, vec![0.1, 0.05], vec![1.0], 1);
        assert!(matches!(sweep(&s), Err(SolverError::InvalidSweep(_))));
    }
}
