//! Subcommand bodies, independent of argument parsing and file output.

use std::fmt::Write as _;

use windowband_core::bands::DEFAULT_REFINE_TOL;
use windowband_core::inner::checks::{verify_profiles, window_gluing_residuals, InnerLayerReport};
use windowband_core::{
    band_intervals, matching_order1, rotate_basis, sample_bands, CellEigenData,
    DerivativeConvention, FigureCase,
};
use windowband_solvers::cell::{
    assemble_neumann, cell_eigendata, tune_degeneracy, DEFAULT_CLUSTER_TOL, DEFAULT_SEED,
};
use windowband_solvers::{rate_sweep, CellSpec, SolverError, SweepReport};

use crate::config::{CellConfig, ValidationConfig};
use crate::error::{CliError, Result};
use crate::formats::{band_csv, validation_csv, BandSummary, Diagnostics, EigendataFile};

pub const DEFAULT_SAMPLES: usize = 1024;

/// Lowest eigenvalue cluster (or the one nearest the hint), or a tuned
/// double eigenvalue when the config asks for it.
pub fn cell_solve(config: &CellConfig, seed: Option<u64>) -> Result<EigendataFile> {
    let spec = config.spec()?;
    let seed = seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let unknowns = spec.mesh.len();
    if let Some(tune) = &config.tune {
        let potential = spec.potential;
        let family = |t: f64| CellSpec::new(spec.mesh.clone(), potential.with_amplitude(t));
        let tuned = tune_degeneracy(family, &tune.options(seed))?;
        let mut file = EigendataFile::from_data(&tuned.data);
        file.diagnostics = Some(Diagnostics {
            eigenvalues: vec![tuned.even_value, tuned.odd_value],
            residuals: Vec::new(),
            unknowns,
            tuned_amplitude: Some(tuned.parameter),
            splitting: Some(tuned.splitting),
        });
        return Ok(file);
    }
    let (data, pairs) = cell_eigendata(
        &spec,
        config.num_modes,
        config.lambda0_hint,
        DEFAULT_CLUSTER_TOL,
        seed,
    )?;
    let mut file = EigendataFile::from_data(&data);
    file.diagnostics = Some(Diagnostics {
        eigenvalues: pairs.eigenvalues,
        residuals: pairs.residuals,
        unknowns: assemble_neumann(&spec)?.assembled.dofs(),
        tuned_amplitude: None,
        splitting: None,
    });
    Ok(file)
}

pub struct BandsOutput {
    pub csv: String,
    pub summary: BandSummary,
}

pub fn bands(data: &CellEigenData, samples: usize) -> Result<BandsOutput> {
    if data.multiplicity() >= 2 {
        data.check_non_degeneracy()?;
    }
    let coeffs = sample_bands(data, samples)?;
    let intervals = band_intervals(&coeffs, DEFAULT_REFINE_TOL);
    Ok(BandsOutput {
        csv: band_csv(&coeffs),
        summary: BandSummary::new(&coeffs, &intervals)?,
    })
}

pub fn figure(case: FigureCase, samples: usize, convention: DerivativeConvention) -> Result<String> {
    Ok(band_csv(&sample_bands(&case.data_with(convention), samples)?))
}

pub fn verify_inner() -> (InnerLayerReport, String) {
    let report = verify_profiles();
    let mut table = String::new();
    writeln!(table, "{:<58} {:>14}  {:<28} result", "check", "value", "expected").unwrap();
    for c in &report.checks {
        writeln!(
            table,
            "{:<58} {:>14.6e}  {:<28} {}",
            c.name,
            c.value,
            c.expected,
            if c.passed { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(table, "\nwindow gluing of the first-order inner field (first figure case)").unwrap();
    writeln!(table, "{:>8} {:>14} {:>14}", "theta", "value jump", "flux jump").unwrap();
    let data = FigureCase::One.data();
    for theta in [0.5, 1.5, 2.5, 4.0, 5.5] {
        if let Ok(rot) = rotate_basis(&data, theta) {
            let (value, flux) = window_gluing_residuals(&matching_order1(&rot), 1e-3);
            writeln!(table, "{theta:>8.3} {value:>14.3e} {flux:>14.3e}").unwrap();
        }
    }
    (report, table)
}

pub struct ValidationOutput {
    pub reports: Vec<SweepReport>,
    pub csv: String,
    pub summary: String,
}

impl ValidationOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(SweepReport::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| r.failures().into_iter().map(|f| format!("theta {:.6}: {f}", r.theta)))
            .collect()
    }
}

pub fn summary_text(reports: &[SweepReport]) -> String {
    let mut out = String::new();
    for r in reports {
        writeln!(out, "theta = {:.10} (k = {})", r.theta, r.k).unwrap();
        writeln!(
            out,
            "  {:>8} {:>9} {:>20} {:>12} {:>12} {:>12}",
            "epsilon", "unknowns", "lambda0", "r1/pred", "r2/pred", "separation"
        )
        .unwrap();
        for p in &r.points {
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
            writeln!(
                out,
                "  {:>8} {:>9} {:>20.12} {:>12.6} {:>12} {:>12}",
                p.epsilon,
                p.dofs,
                p.result.lambda0,
                p.ratio1,
                opt(p.ratio2),
                p.separation.map_or("-".to_string(), |x| format!("{x:.3e}")),
            )
            .unwrap();
        }
        if let Some(l) = r.ratio1_limit {
            writeln!(out, "  extrapolated r1/pred: {l:.6}").unwrap();
        }
        if let Some(l) = r.ratio2_limit {
            writeln!(out, "  extrapolated r2/pred: {l:.6}").unwrap();
        }
        for c in &r.checks {
            writeln!(out, "  {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name).unwrap();
        }
    }
    out
}

/// Runs the sweep. A failed trend check still yields the full output; the
/// caller decides how to report it.
pub fn validate(config: &ValidationConfig, seed: Option<u64>) -> Result<ValidationOutput> {
    let spec = config.sweep_spec(seed)?;
    let reports = match rate_sweep(&spec) {
        Ok(r) => r,
        Err(SolverError::TrendViolation(r)) => *r,
        Err(e) => return Err(CliError::Solver(e)),
    };
    Ok(ValidationOutput {
        csv: validation_csv(&reports),
        summary: summary_text(&reports),
        reports,
    })
}
