//! On-disk formats: eigendata JSON, band and validation CSV, band summary
//! JSON.
//!
//! JSON numbers are written in shortest round-trip form and parsed with
//! exact rounding, so values survive a write/read cycle bit for bit. CSV
//! numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use windowband_core::{
    band_edges_at_epsilon, BandCoefficients, BandInterval, CellEigenData, Complex64,
    ExtremumLocation, TraceData,
};
use windowband_solvers::SweepReport;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub value_plus: [f64; 2],
    pub value_minus: [f64; 2],
    pub deriv_plus: [f64; 2],
    pub deriv_minus: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&TraceData> for TraceRecord {
    fn from(t: &TraceData) -> Self {
        Self {
            value_plus: pair(t.value_plus),
            value_minus: pair(t.value_minus),
            deriv_plus: pair(t.deriv_plus),
            deriv_minus: pair(t.deriv_minus),
        }
    }
}

impl From<&TraceRecord> for TraceData {
    fn from(r: &TraceRecord) -> Self {
        TraceData::new(
            complex(r.value_plus),
            complex(r.value_minus),
            complex(r.deriv_plus),
            complex(r.deriv_minus),
        )
    }
}

/// Solver details attached by `cell-solve`; ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub unknowns: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuned_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigendataFile {
    pub lambda0: f64,
    pub k: usize,
    pub traces: Vec<TraceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl EigendataFile {
    pub fn from_data(data: &CellEigenData) -> Self {
        Self {
            lambda0: data.lambda0(),
            k: data.multiplicity(),
            traces: data.traces().iter().map(TraceRecord::from).collect(),
            diagnostics: None,
        }
    }

    pub fn to_data(&self) -> Result<CellEigenData> {
        if self.k != self.traces.len() {
            return Err(CliError::Config(format!(
                "eigendata declares k = {} but lists {} traces",
                self.k,
                self.traces.len()
            )));
        }
        let traces = self.traces.iter().map(TraceData::from).collect();
        Ok(CellEigenData::new(self.lambda0, traces)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("eigendata always serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_eigendata(path: &Path) -> Result<EigendataFile> {
    EigendataFile::from_json(&read_text(path)?, path)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const BAND_CSV_HEADER: &str = "theta,lambda01,lambda10";

pub fn band_csv(coeffs: &BandCoefficients) -> String {
    let mut out = String::with_capacity(64 * coeffs.len());
    out.push_str(BAND_CSV_HEADER);
    out.push('\n');
    for (m, theta) in coeffs.thetas.iter().enumerate() {
        let quad = coeffs
            .quadratic_coeff
            .as_ref()
            .map(|q| num(q[m]))
            .unwrap_or_default();
        writeln!(out, "{},{},{}", num(*theta), num(coeffs.log_coeff[m]), quad).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    pub theta: f64,
    pub log_coeff: f64,
    pub quadratic_coeff: Option<f64>,
}

pub fn parse_band_csv(text: &str) -> Result<Vec<BandRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(BAND_CSV_HEADER) {
        return Err(CliError::Config("band CSV header mismatch".into()));
    }
    let bad = |line: &str| CliError::Config(format!("bad band CSV row: {line}"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(line));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            Ok(BandRow {
                theta: parse(f[0])?,
                log_coeff: parse(f[1])?,
                quadratic_coeff: if f[2].is_empty() { None } else { Some(parse(f[2])?) },
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    /// Edge coefficient of the lower band end.
    pub lower: f64,
    pub upper: f64,
    pub arg_lower: Vec<f64>,
    pub arg_upper: Vec<f64>,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub k: usize,
    pub lambda0: f64,
    pub samples: usize,
    pub log_band: IntervalSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic_band: Option<IntervalSummary>,
    /// Leading-order bands are disjoint for all smaller window widths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint_below_epsilon: Option<f64>,
}

fn classification_name(c: ExtremumLocation) -> &'static str {
    match c {
        ExtremumLocation::EndpointsOrCenter => "endpoints_or_center",
        ExtremumLocation::InteriorPoints => "interior_points",
    }
}

impl From<&BandInterval> for IntervalSummary {
    fn from(b: &BandInterval) -> Self {
        Self {
            lower: b.lower_coeff,
            upper: b.upper_coeff,
            arg_lower: b.arg_lower.clone(),
            arg_upper: b.arg_upper.clone(),
            classification: classification_name(b.classification).into(),
        }
    }
}

impl BandSummary {
    pub fn new(coeffs: &BandCoefficients, intervals: &[BandInterval]) -> Result<Self> {
        let lambda0 = coeffs.data.lambda0();
        let edges = band_edges_at_epsilon(intervals, lambda0, 0.5)?;
        Ok(Self {
            k: coeffs.data.multiplicity(),
            lambda0,
            samples: coeffs.len(),
            log_band: IntervalSummary::from(&intervals[0]),
            quadratic_band: intervals.get(1).map(IntervalSummary::from),
            disjoint_below_epsilon: edges.disjoint_below,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary always serializes")
    }
}

pub const VALIDATION_CSV_HEADER: &str = "epsilon,theta,j,lambda,r_diagnostic";

/// One row per tracked eigenvalue, `j` counting branches from the one
/// farthest from `lambda0`.
pub fn validation_csv(reports: &[SweepReport]) -> String {
    let mut out = String::from(VALIDATION_CSV_HEADER);
    out.push('\n');
    for r in reports {
        for p in &r.points {
            let res = &p.result;
            let diag = std::iter::once(res.r1).chain(res.r2).chain(res.r3.iter().copied());
            for (j, (lambda, d)) in res.branches().into_iter().zip(diag).enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    num(res.epsilon),
                    num(res.theta),
                    j + 1,
                    num(lambda),
                    num(d)
                )
                .unwrap();
            }
        }
    }
    out
}
