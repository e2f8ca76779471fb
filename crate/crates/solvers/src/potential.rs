use std::f64::consts::TAU;

use crate::error::{Result, SolverError};
use crate::mesh::Mesh;

/// Registry of cell potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    Constant {
        value: f64,
    },
    /// `offset + amplitude cos(2 pi x1 + phase) (1 + x2_weight cos(2 pi x2_wavenumber x2 / H))`.
    ///
    /// Always even in `x2`. A zero `phase` makes it symmetric about
    /// `x1 = 1/2`.
    SeparableCosine {
        amplitude: f64,
        phase: f64,
        x2_weight: f64,
        x2_wavenumber: f64,
        offset: f64,
    },
}

impl Potential {
    pub fn separable_cosine(amplitude: f64, phase: f64, x2_weight: f64) -> Self {
        Self::SeparableCosine {
            amplitude,
            phase,
            x2_weight,
            x2_wavenumber: 1.0,
            offset: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Constant { .. } => "constant",
            Self::SeparableCosine { .. } => "separable-cosine",
        }
    }

    pub fn evaluate(&self, x1: f64, x2: f64, height: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant { value } => value,
            Self::SeparableCosine {
                amplitude,
                phase,
                x2_weight,
                x2_wavenumber,
                offset,
            } => {
                offset
                    + amplitude
                        * (TAU * x1 + phase).cos()
                        * (1.0 + x2_weight * (TAU * x2_wavenumber * x2 / height).cos())
            }
        }
    }

    /// Same family with a new amplitude; other kinds are returned unchanged.
    pub fn with_amplitude(&self, t: f64) -> Self {
        match *self {
            Self::SeparableCosine {
                phase,
                x2_weight,
                x2_wavenumber,
                offset,
                ..
            } => Self::SeparableCosine {
                amplitude: t,
                phase,
                x2_weight,
                x2_wavenumber,
                offset,
            },
            other => other,
        }
    }

    /// Node samples in mesh order, checked for finiteness and for
    /// agreement of the two vertical edges.
    pub fn sample(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(mesh.len());
        for &x2 in &mesh.x2 {
            for &x1 in &mesh.x1 {
                values.push(self.evaluate(x1, x2, mesh.height));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SolverError::PotentialError(format!("non-finite sample {v}")));
        }
        let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let n1 = mesh.n1();
        for j in 0..mesh.n2() {
            let (left, right) = (values[mesh.index(0, j)], values[mesh.index(n1 - 1, j)]);
            if (left - right).abs() > 1e-12 * scale {
                return Err(SolverError::PotentialError(format!(
                    "V(0, x2) != V(1, x2) at x2 = {}",
                    mesh.x2[j]
                )));
            }
        }
        Ok(values)
    }

    pub fn is_even_in_x2(samples: &[f64], mesh: &Mesh) -> bool {
        let r = mesh.reflection();
        samples.iter().enumerate().all(|(p, v)| *v == samples[r[p]])
    }
}
