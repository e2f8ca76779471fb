//! Neumann eigenproblem of `-Laplace + V` on the decoupled cell, trace
//! extraction at the junction points and a tuner that produces an exactly
//! degenerate eigenvalue.

use windowband_core::{CellEigenData, TraceData};

use crate::assemble::{assemble, Assembled};
use crate::eigen::{EigenOptions, Projector, ShiftInvert};
use crate::error::{Result, SolverError};
use crate::mesh::{Mesh, Refinement};
use crate::potential::Potential;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
pub const DEFAULT_SEED: u64 = 20140601;

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub mesh: Mesh,
    pub potential: Potential,
}

impl CellSpec {
    pub fn new(mesh: Mesh, potential: Potential) -> Result<Self> {
        mesh.validate()?;
        potential.sample(&mesh)?;
        Ok(Self { mesh, potential })
    }

    pub fn uniform(height: f64, nx: usize, ny: usize, potential: Potential) -> Result<Self> {
        Self::new(Mesh::uniform(height, nx, ny)?, potential)
    }

    /// Mesh graded to resolve a window of half-width `epsilon`.
    pub fn for_window(
        height: f64,
        epsilon: f64,
        refinement: &Refinement,
        potential: Potential,
    ) -> Result<Self> {
        Self::new(Mesh::for_window(height, epsilon, refinement)?, potential)
    }

    pub fn height(&self) -> f64 {
        self.mesh.height
    }

    pub fn with_potential(&self, potential: Potential) -> Self {
        Self {
            mesh: self.mesh.clone(),
            potential,
        }
    }
}

pub struct CellOperator {
    pub assembled: Assembled<f64>,
    pub samples: Vec<f64>,
}

impl CellOperator {
    /// Shift safely below the whole spectrum.
    pub fn lower_shift(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min) - 1.0
    }
}

pub fn assemble_neumann(spec: &CellSpec) -> Result<CellOperator> {
    let samples = spec.potential.sample(&spec.mesh)?;
    Ok(CellOperator {
        assembled: assemble::<f64>(&spec.mesh, &samples, None),
        samples,
    })
}

#[derive(Debug, Clone)]
pub struct EigenpairSet {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Nodal values, orthonormal in the lumped-mass inner product.
    pub modes: Vec<Vec<f64>>,
    pub traces: Vec<TraceData>,
    pub residuals: Vec<f64>,
}

/// Values and `d/dx2` at `(0, 0)` and `(1, 0)`.
pub fn mode_traces(mesh: &Mesh, u: &[f64]) -> Result<TraceData> {
    let j0 = mesh.midline();
    let h = mesh.x2[j0 + 1] - mesh.x2[j0];
    for k in [-2i64, -1, 1] {
        let a = (j0 as i64 + k) as usize;
        if ((mesh.x2[a + 1] - mesh.x2[a]) - h).abs() > 1e-12 * h {
            return Err(SolverError::GridError(
                "derivative stencil needs uniform spacing around the midline".into(),
            ));
        }
    }
    let at = |i: usize, dj: i64| u[mesh.index(i, (j0 as i64 + dj) as usize)];
    let deriv = |i: usize| (-at(i, 2) + 8.0 * at(i, 1) - 8.0 * at(i, -1) + at(i, -2)) / (12.0 * h);
    let right = mesh.n1() - 1;
    Ok(TraceData::real(at(right, 0), at(0, 0), deriv(right), deriv(0)))
}

fn pairs_from(
    op: &CellOperator,
    mesh: &Mesh,
    pairs: crate::eigen::EigenPairs<f64>,
) -> Result<EigenpairSet> {
    let modes: Vec<Vec<f64>> = pairs.vectors.iter().map(|y| op.assembled.nodal(y)).collect();
    let traces = modes
        .iter()
        .map(|u| mode_traces(mesh, u))
        .collect::<Result<_>>()?;
    Ok(EigenpairSet {
        eigenvalues: pairs.values,
        modes,
        traces,
        residuals: pairs.residuals,
    })
}

/// The `m` lowest eigenpairs.
pub fn solve_lowest(spec: &CellSpec, op: &CellOperator, m: usize, seed: u64) -> Result<EigenpairSet> {
    let shift = op.lower_shift();
    let mut opts = EigenOptions::new(m, shift);
    opts.seed = seed;
    let pairs = ShiftInvert::new(&op.assembled.matrix, shift)?.solve(&opts, None, None)?;
    pairs_from(op, &spec.mesh, pairs)
}

/// Groups the eigenvalue at `index` with neighbours closer than
/// `cluster_tol (1 + |lambda|)` and returns the cluster as trace data.
pub fn extract_traces(pairs: &EigenpairSet, index: usize, cluster_tol: f64) -> Result<CellEigenData> {
    let ev = &pairs.eigenvalues;
    let tol = |l: f64| cluster_tol * (1.0 + l.abs());
    let (mut lo, mut hi) = (index, index);
    while lo > 0 && ev[lo] - ev[lo - 1] <= tol(ev[lo]) {
        lo -= 1;
    }
    while hi + 1 < ev.len() && ev[hi + 1] - ev[hi] <= tol(ev[hi]) {
        hi += 1;
    }
    if hi + 1 == ev.len() {
        return Err(SolverError::ClusterAmbiguity {
            gap: f64::NAN,
            tolerance: tol(ev[hi]),
        });
    }
    let mut boundary = vec![ev[hi + 1] - ev[hi]];
    if lo > 0 {
        boundary.push(ev[lo] - ev[lo - 1]);
    }
    for gap in boundary {
        if gap < 10.0 * tol(ev[index]) {
            return Err(SolverError::ClusterAmbiguity {
                gap,
                tolerance: tol(ev[index]),
            });
        }
    }
    let lambda0 = ev[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
    Ok(CellEigenData::new(lambda0, pairs.traces[lo..=hi].to_vec())?)
}

/// Cluster nearest `hint` (or the lowest one) among the `num_modes` lowest
/// eigenpairs.
pub fn cell_eigendata(
    spec: &CellSpec,
    num_modes: usize,
    hint: Option<f64>,
    cluster_tol: f64,
    seed: u64,
) -> Result<(CellEigenData, EigenpairSet)> {
    let op = assemble_neumann(spec)?;
    let pairs = solve_lowest(spec, &op, num_modes, seed)?;
    let index = match hint {
        Some(h) => (0..pairs.eigenvalues.len())
            .min_by(|&a, &b| {
                (pairs.eigenvalues[a] - h)
                    .abs()
                    .total_cmp(&(pairs.eigenvalues[b] - h).abs())
            })
            .unwrap_or(0),
        None => 0,
    };
    let data = extract_traces(&pairs, index, cluster_tol)?;
    Ok((data, pairs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    pub bracket: (f64, f64),
    /// Position of the tracked branch within the even sector.
    pub even_index: usize,
    /// Position of the tracked branch within the odd sector.
    pub odd_index: usize,
    /// Absolute bound on `|even - odd|`.
    pub tol: f64,
    pub max_bisections: usize,
    pub seed: u64,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            bracket: (5.0, 14.0),
            even_index: 1,
            odd_index: 0,
            tol: 1e-9,
            max_bisections: 200,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TunedCell {
    pub parameter: f64,
    pub spec: CellSpec,
    pub even_value: f64,
    pub odd_value: f64,
    /// `|even_value - odd_value|`.
    pub splitting: f64,
    /// Even mode first, odd mode second.
    pub data: CellEigenData,
    pub bisections: usize,
}

struct SectorSolve {
    value: f64,
    mode: Vec<f64>,
    start: Vec<Vec<f64>>,
}

fn sector(
    op: &CellOperator,
    projector: &Projector,
    index: usize,
    seed: u64,
    start: Option<&[Vec<f64>]>,
    factor: &ShiftInvert<f64>,
) -> Result<SectorSolve> {
    let mut opts = EigenOptions::new(index + 1, factor.shift());
    opts.seed = seed;
    let pairs = factor.solve(&opts, Some(projector), start)?;
    Ok(SectorSolve {
        value: pairs.values[index],
        mode: op.assembled.nodal(&pairs.vectors[index]),
        start: pairs.vectors,
    })
}

/// Bisection on the family parameter until the tracked even and odd
/// branches coincide to `tol (1 + |lambda|)`.
pub fn tune_degeneracy<F: Fn(f64) -> Result<CellSpec>>(family: F, opts: &TuneOptions) -> Result<TunedCell> {
    let mut warm: (Option<Vec<Vec<f64>>>, Option<Vec<Vec<f64>>>) = (None, None);
    let mut evaluate = |t: f64| -> Result<(CellSpec, SectorSolve, SectorSolve)> {
        let spec = family(t)?;
        let op = assemble_neumann(&spec)?;
        if !Potential::is_even_in_x2(&op.samples, &spec.mesh) {
            return Err(SolverError::PotentialError(
                "degeneracy tuning needs a potential even in x2".into(),
            ));
        }
        let mirror = op
            .assembled
            .dof_mirror(&spec.mesh.reflection())
            .expect("Neumann unknowns are the mesh nodes");
        let factor = ShiftInvert::new(&op.assembled.matrix, op.lower_shift())?;
        let even = sector(
            &op,
            &Projector::even(mirror.clone()),
            opts.even_index,
            opts.seed,
            warm.0.as_deref(),
            &factor,
        )?;
        let odd = sector(
            &op,
            &Projector::odd(mirror),
            opts.odd_index,
            opts.seed.wrapping_add(1),
            warm.1.as_deref(),
            &factor,
        )?;
        warm = (Some(even.start.clone()), Some(odd.start.clone()));
        Ok((spec, even, odd))
    };

    let (mut lo, mut hi) = opts.bracket;
    let (_, e, o) = evaluate(lo)?;
    let f_lo = e.value - o.value;
    let (_, e, o) = evaluate(hi)?;
    let f_hi = e.value - o.value;
    if f_lo.signum() == f_hi.signum() {
        return Err(SolverError::NoCrossing {
            lower: lo,
            upper: hi,
            at_lower: f_lo,
            at_upper: f_hi,
        });
    }
    let mut sign_lo = f_lo.signum();
    let mut bisections = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let (spec, even, odd) = evaluate(mid)?;
        bisections += 1;
        let f = even.value - odd.value;
        let done = f.abs() < opts.tol
            || bisections >= opts.max_bisections
            || hi - lo <= 4.0 * f64::EPSILON * mid.abs();
        if done {
            let t_even = mode_traces(&spec.mesh, &even.mode)?;
            let t_odd = mode_traces(&spec.mesh, &odd.mode)?;
            let lambda0 = 0.5 * (even.value + odd.value);
            let data = CellEigenData::new_non_degenerate(lambda0, vec![t_even, t_odd]).map_err(
                |e| match e {
                    windowband_core::Error::NonDegeneracyViolated { plus, minus } => {
                        SolverError::NonDegeneracyViolated { plus, minus }
                    }
                    other => other.into(),
                },
            )?;
            return Ok(TunedCell {
                parameter: mid,
                spec,
                even_value: even.value,
                odd_value: odd.value,
                splitting: f.abs(),
                data,
                bisections,
            });
        }
        if f.signum() == sign_lo {
            lo = mid;
            sign_lo = f.signum();
        } else {
            hi = mid;
        }
    }
}
