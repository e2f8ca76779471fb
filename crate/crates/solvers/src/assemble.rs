//! Finite-volume assembly of `-Laplace + V` on a tensor mesh.
//!
//! Each node owns the dual rectangle spanned by the half-intervals around
//! it. The stiffness form sums `(dual length / spacing) |u_a - u_b|^2` over
//! mesh edges, so Neumann conditions are natural. The generalized problem
//! `A u = lambda W u` with lumped mass `W` is returned in the symmetric
//! form `S = W^{-1/2} A W^{-1/2}`.
//!
//! Quasi-periodic coupling eliminates the right-edge nodes inside the
//! window through `u(1, x2) = e^{i theta} u(0, x2)`; restricting the form
//! this way keeps `S` Hermitian entry by entry.

use crate::mesh::Mesh;
use crate::sparse::{CsrMatrix, Scalar};

/// Identification of right-edge rows with the left edge.
#[derive(Debug, Clone)]
pub struct Coupling<T> {
    /// One flag per `x2` row.
    pub window: Vec<bool>,
    pub phase: T,
}

#[derive(Debug, Clone)]
pub struct Assembled<T> {
    /// `W^{-1/2} A W^{-1/2}`.
    pub matrix: CsrMatrix<T>,
    /// Lumped mass per unknown.
    pub mass: Vec<f64>,
    /// Unknown carrying each mesh node, and the factor relating them.
    pub node_dof: Vec<usize>,
    pub node_phase: Vec<T>,
}

impl<T: Scalar> Assembled<T> {
    pub fn dofs(&self) -> usize {
        self.mass.len()
    }

    /// Nodal values `u = W^{-1/2} y` expanded to every mesh node.
    pub fn nodal(&self, y: &[T]) -> Vec<T> {
        self.node_dof
            .iter()
            .zip(&self.node_phase)
            .map(|(&d, &p)| p * y[d] * T::from_real(1.0 / self.mass[d].sqrt()))
            .collect()
    }

    /// Involution on unknowns induced by a node involution, if the
    /// elimination respects it.
    pub fn dof_mirror(&self, node_mirror: &[usize]) -> Option<Vec<usize>> {
        let mut out = vec![usize::MAX; self.dofs()];
        for (node, &d) in self.node_dof.iter().enumerate() {
            let m = self.node_dof[node_mirror[node]];
            if out[d] != usize::MAX && out[d] != m {
                return None;
            }
            out[d] = m;
        }
        Some(out)
    }
}

pub fn assemble<T: Scalar>(
    mesh: &Mesh,
    potential: &[f64],
    coupling: Option<&Coupling<T>>,
) -> Assembled<T> {
    let (n1, n2) = (mesh.n1(), mesh.n2());
    let d1 = Mesh::dual(&mesh.x1);
    let d2 = Mesh::dual(&mesh.x2);
    let coupled = |i: usize, j: usize| i == n1 - 1 && coupling.is_some_and(|c| c.window[j]);

    let mut node_dof = vec![0; mesh.len()];
    let mut node_phase = vec![T::one(); mesh.len()];
    let mut dofs = 0;
    for j in 0..n2 {
        for i in 0..n1 {
            if !coupled(i, j) {
                node_dof[mesh.index(i, j)] = dofs;
                dofs += 1;
            }
        }
    }
    if let Some(c) = coupling {
        for j in (0..n2).filter(|&j| c.window[j]) {
            let right = mesh.index(n1 - 1, j);
            node_dof[right] = node_dof[mesh.index(0, j)];
            node_phase[right] = c.phase;
        }
    }

    let mut diag = vec![0.0; dofs];
    let mut mass = vec![0.0; dofs];
    let mut off: Vec<(usize, usize, T)> = Vec::with_capacity(4 * dofs);
    let mut edge = |a: usize, b: usize, w: f64| {
        let (ra, rb) = (node_dof[a], node_dof[b]);
        let (pa, pb) = (node_phase[a], node_phase[b]);
        diag[ra] += w;
        diag[rb] += w;
        let v = pa.conjugate() * pb * T::from_real(-w);
        off.push((ra, rb, v));
        off.push((rb, ra, v.conjugate()));
    };
    for j in 0..n2 {
        for i in 0..n1 {
            let p = mesh.index(i, j);
            if i + 1 < n1 {
                edge(p, mesh.index(i + 1, j), d2[j] / (mesh.x1[i + 1] - mesh.x1[i]));
            }
            if j + 1 < n2 {
                edge(p, mesh.index(i, j + 1), d1[i] / (mesh.x2[j + 1] - mesh.x2[j]));
            }
        }
    }
    for j in 0..n2 {
        for i in 0..n1 {
            let p = mesh.index(i, j);
            let w = d1[i] * d2[j];
            mass[node_dof[p]] += w;
            diag[node_dof[p]] += w * potential[p];
        }
    }

    let inv_sqrt: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut triplets: Vec<(usize, usize, T)> = off
        .into_iter()
        .map(|(a, b, v)| (a, b, v * T::from_real(inv_sqrt[a] * inv_sqrt[b])))
        .collect();
    triplets.extend(
        diag.iter()
            .enumerate()
            .map(|(d, v)| (d, d, T::from_real(v * inv_sqrt[d] * inv_sqrt[d]))),
    );
    Assembled {
        matrix: CsrMatrix::from_triplets(dofs, triplets),
        mass,
        node_dof,
        node_phase,
    }
}
