//! Cell and validation configuration files.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use windowband_solvers::cell::{TuneOptions, DEFAULT_SEED};
use windowband_solvers::{CellSpec, MeshPlan, Potential, Refinement, SweepSpec};

use crate::error::{CliError, Result};
use crate::formats::read_text;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    Constant {
        value: f64,
    },
    SeparableCosine {
        amplitude: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        x2_weight: f64,
        #[serde(default = "one")]
        x2_wavenumber: f64,
        #[serde(default)]
        offset: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl From<PotentialConfig> for Potential {
    fn from(p: PotentialConfig) -> Self {
        match p {
            PotentialConfig::Zero => Potential::Zero,
            PotentialConfig::Constant { value } => Potential::Constant { value },
            PotentialConfig::SeparableCosine {
                amplitude,
                phase,
                x2_weight,
                x2_wavenumber,
                offset,
            } => Potential::SeparableCosine {
                amplitude,
                phase,
                x2_weight,
                x2_wavenumber,
                offset,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneConfig {
    /// Amplitude range searched for the crossing.
    pub bracket: [f64; 2],
    #[serde(default = "default_even_index")]
    pub even_index: usize,
    #[serde(default)]
    pub odd_index: usize,
    #[serde(default = "default_tune_tol")]
    pub tol: f64,
    #[serde(default = "default_bisections")]
    pub max_bisections: usize,
}

fn default_even_index() -> usize {
    1
}

fn default_tune_tol() -> f64 {
    1e-9
}

fn default_bisections() -> usize {
    200
}

impl TuneConfig {
    pub fn options(&self, seed: u64) -> TuneOptions {
        TuneOptions {
            bracket: (self.bracket[0], self.bracket[1]),
            even_index: self.even_index,
            odd_index: self.odd_index,
            tol: self.tol,
            max_bisections: self.max_bisections,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub potential: PotentialConfig,
    #[serde(default = "default_modes")]
    pub num_modes: usize,
    /// Pick the eigenvalue cluster nearest this value instead of the lowest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0_hint: Option<f64>,
    /// Vary the potential amplitude until two parity branches cross.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_modes() -> usize {
    6
}

impl CellConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse(path)
    }

    pub fn check(&self) -> Result<()> {
        if self.num_modes == 0 {
            return Err(CliError::Config("num_modes must be positive".into()));
        }
        if self.tune.is_some() && !matches!(self.potential, PotentialConfig::SeparableCosine { .. }) {
            return Err(CliError::Config(
                "tuning varies the amplitude of the separable-cosine family".into(),
            ));
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<CellSpec> {
        self.check()?;
        Ok(CellSpec::uniform(self.height, self.nx, self.ny, self.potential.into())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    #[serde(default = "default_core")]
    pub core_intervals: usize,
    /// Defaults to the spacing of the cell's `nx` x `ny` grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(default = "default_growth")]
    pub growth: f64,
}

fn default_core() -> usize {
    8
}

fn default_growth() -> f64 {
    1.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub cell: CellConfig,
    pub epsilons: Vec<f64>,
    pub thetas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0_hint: Option<f64>,
    pub k: usize,
    /// Window-resolving graded meshes; without it every width reuses the
    /// uniform cell grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshConfig>,
    /// Allowed distance of the extrapolated primary ratio from 1; 0.1 for
    /// `k = 1`, 0.25 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl ValidationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse(path)
    }

    /// Ground state of an asymmetric cell at `theta = pi/2` and `pi`.
    pub fn default_k1() -> Self {
        Self {
            cell: CellConfig {
                height: 1.0,
                nx: 40,
                ny: 40,
                potential: PotentialConfig::SeparableCosine {
                    amplitude: 5.0,
                    phase: 1.0,
                    x2_weight: 0.5,
                    x2_wavenumber: 1.0,
                    offset: 0.0,
                },
                num_modes: 6,
                lambda0_hint: None,
                tune: None,
                seed: None,
            },
            epsilons: vec![0.08, 0.04, 0.02],
            thetas: vec![PI / 2.0, PI],
            lambda0_hint: None,
            k: 1,
            mesh: Some(MeshConfig {
                core_intervals: 8,
                h_max: None,
                growth: 1.15,
            }),
            tolerance: None,
        }
    }

    /// Tuned double eigenvalue at `theta = pi/2`.
    pub fn default_k2() -> Self {
        Self {
            cell: CellConfig {
                height: 0.8,
                nx: 40,
                ny: 32,
                potential: PotentialConfig::SeparableCosine {
                    amplitude: 9.0,
                    phase: 1.0,
                    x2_weight: 0.0,
                    x2_wavenumber: 1.0,
                    offset: 0.0,
                },
                num_modes: 6,
                lambda0_hint: None,
                tune: Some(TuneConfig {
                    bracket: [5.0, 14.0],
                    even_index: 1,
                    odd_index: 0,
                    tol: 1e-9,
                    max_bisections: 200,
                }),
                seed: None,
            },
            epsilons: vec![0.02, 0.01, 0.005],
            thetas: vec![PI / 2.0],
            lambda0_hint: None,
            k: 2,
            mesh: Some(MeshConfig {
                core_intervals: 12,
                h_max: None,
                growth: 1.15,
            }),
            tolerance: None,
        }
    }

    pub fn sweep_spec(&self, seed: Option<u64>) -> Result<SweepSpec> {
        let cell = &self.cell;
        cell.check()?;
        let mesh = match self.mesh {
            Some(m) => MeshPlan::Graded(Refinement {
                core_intervals: m.core_intervals,
                h_max: m
                    .h_max
                    .unwrap_or_else(|| (1.0 / cell.nx as f64).min(cell.height / cell.ny as f64)),
                growth: m.growth,
            }),
            None => MeshPlan::Uniform {
                nx: cell.nx,
                ny: cell.ny,
            },
        };
        let seed = seed.or(cell.seed).unwrap_or(DEFAULT_SEED);
        let mut spec = SweepSpec::new(
            cell.height,
            cell.potential.into(),
            self.epsilons.clone(),
            self.thetas.clone(),
            self.k,
        );
        spec.mesh = mesh;
        spec.lambda0_hint = self.lambda0_hint.or(cell.lambda0_hint);
        spec.tune = cell.tune.map(|t| t.options(seed));
        spec.tolerance = self
            .tolerance
            .unwrap_or(if self.k == 1 { 0.1 } else { 0.25 });
        spec.num_modes = cell.num_modes;
        spec.seed = seed;
        Ok(spec)
    }
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_registry_parses() {
        let p: PotentialConfig = serde_json::from_str(r#"{"kind": "zero"}"#).unwrap();
        assert_eq!(p, PotentialConfig::Zero);
        let p: PotentialConfig =
            serde_json::from_str(r#"{"kind": "separable-cosine", "params": {"amplitude": 2.0, "phase": 1.0}}"#)
                .unwrap();
        assert!(matches!(
            Potential::from(p),
            Potential::SeparableCosine { amplitude: 2.0, x2_wavenumber: 1.0, .. }
        ));
        assert!(serde_json::from_str::<PotentialConfig>(r#"{"kind": "gaussian"}"#).is_err());
    }

    #[test]
    fn default_grading_follows_cell_grid() {
        let spec = ValidationConfig::default_k1().sweep_spec(None).unwrap();
        assert_eq!(
            spec.mesh,
            MeshPlan::Graded(Refinement {
                core_intervals: 8,
                h_max: 1.0 / 40.0,
                growth: 1.15
            })
        );
        assert_eq!(spec.tolerance, 0.1);
        let k2 = ValidationConfig::default_k2().sweep_spec(Some(7)).unwrap();
        assert_eq!(k2.tolerance, 0.25);
        assert_eq!(k2.tune.unwrap().seed, 7);
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = ValidationConfig::default_k2();
        let back: ValidationConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
