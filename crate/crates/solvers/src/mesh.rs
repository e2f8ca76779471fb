//! Tensor-product node sets on the cell `[0, 1] x [-H/2, H/2]`.
//!
//! Meshes are always symmetric under `x2 -> -x2` with a node row exactly on
//! `x2 = 0`, so the junction points are nodes and parity projections are
//! exact permutations.

use crate::error::{Result, SolverError};

/// Minimum number of intervals in each direction.
pub const MIN_INTERVALS: usize = 16;

/// Grading parameters for window-resolving meshes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    /// The window edge sits halfway between nodes `m` and `m + 1` of the
    /// uniform core, so the finest spacing is `eps / (m + 1/2)`.
    pub core_intervals: usize,
    pub h_max: f64,
    pub growth: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            core_intervals: 8,
            h_max: 1.0 / 40.0,
            growth: 1.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub height: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

/// Nodes from `a` to `b` with steps growing geometrically from `h_min` up
/// to `h_max`, rescaled so the last node is exactly `b`.
fn graded(a: f64, b: f64, h_min: f64, h_max: f64, growth: f64) -> Vec<f64> {
    let mut xs = vec![a];
    let mut h = h_min;
    while *xs.last().unwrap() < b {
        xs.push(xs.last().unwrap() + h);
        h = (h * growth).min(h_max);
    }
    let last = *xs.last().unwrap();
    let scale = (b - a) / (last - a);
    for x in xs.iter_mut() {
        *x = a + (*x - a) * scale;
    }
    *xs.last_mut().unwrap() = b;
    xs
}

/// Mirrors non-negative positions starting at 0 into a symmetric node set.
fn mirrored(half: &[f64]) -> Vec<f64> {
    half.iter()
        .rev()
        .map(|x| -x)
        .chain(half.iter().skip(1).copied())
        .collect()
}

fn check_height(height: f64) -> Result<()> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(SolverError::GridError(format!(
            "cell height must be positive, got {height}"
        )));
    }
    Ok(())
}

impl Mesh {
    pub fn uniform(height: f64, nx: usize, ny: usize) -> Result<Self> {
        check_height(height)?;
        if nx < MIN_INTERVALS || ny < MIN_INTERVALS {
            return Err(SolverError::GridError(format!(
                "need nx, ny >= {MIN_INTERVALS}, got {nx} x {ny}"
            )));
        }
        if ny % 2 != 0 {
            return Err(SolverError::GridError(format!(
                "ny must be even so the midline is a node row, got {ny}"
            )));
        }
        let x1 = (0..=nx).map(|i| i as f64 / nx as f64).collect();
        let h = height / ny as f64;
        let half: Vec<f64> = (0..=ny / 2)
            .map(|j| if j == ny / 2 { height / 2.0 } else { j as f64 * h })
            .collect();
        Ok(Self {
            height,
            x1,
            x2: mirrored(&half),
        })
    }

    /// Graded in `x1` toward both ends and in `x2` toward the midline, with
    /// a uniform core of `core_intervals + 1` steps around `x2 = 0`.
    pub fn for_window(height: f64, epsilon: f64, refinement: &Refinement) -> Result<Self> {
        check_height(height)?;
        let Refinement {
            core_intervals: m,
            h_max,
            growth,
        } = *refinement;
        if !(epsilon > 0.0 && epsilon < height / 2.0) {
            return Err(SolverError::GridError(format!(
                "window half-width {epsilon} outside (0, {})",
                height / 2.0
            )));
        }
        if !(growth >= 1.0 && h_max > 0.0) {
            return Err(SolverError::GridError(format!(
                "bad grading: growth {growth}, h_max {h_max}"
            )));
        }
        let h = epsilon / (m as f64 + 0.5);
        if h > h_max {
            return Err(SolverError::GridError(format!(
                "finest step {h} exceeds h_max {h_max}"
            )));
        }
        let core_end = (m + 1) as f64 * h;
        if core_end >= height / 2.0 {
            return Err(SolverError::GridError(format!(
                "uniform core reaches {core_end}, beyond the half-height"
            )));
        }
        let mut half: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
        half.extend(graded(core_end, height / 2.0, h, h_max, growth));
        let x2 = mirrored(&half);

        let left = graded(0.0, 0.5, h, h_max, growth);
        let mut x1 = left.clone();
        x1.extend(left.iter().rev().skip(1).map(|x| 1.0 - x));
        *x1.last_mut().unwrap() = 1.0;

        let mesh = Self { height, x1, x2 };
        if mesh.x1.len() <= MIN_INTERVALS || mesh.x2.len() <= MIN_INTERVALS {
            return Err(SolverError::GridError("graded mesh too coarse".into()));
        }
        Ok(mesh)
    }

    pub fn n1(&self) -> usize {
        self.x1.len()
    }

    pub fn n2(&self) -> usize {
        self.x2.len()
    }

    pub fn len(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row of `x2 = 0`.
    pub fn midline(&self) -> usize {
        self.n2() / 2
    }

    /// Linear index; `x1` runs fastest so the bandwidth is one row.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1() + i
    }

    /// Half-cell widths around each node.
    pub fn dual(xs: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; xs.len()];
        for k in 0..xs.len() - 1 {
            let half = 0.5 * (xs[k + 1] - xs[k]);
            d[k] += half;
            d[k + 1] += half;
        }
        d
    }

    /// Number of grid intervals lying inside `(-eps, eps)` on the edge.
    pub fn window_intervals(&self, epsilon: f64) -> usize {
        self.x2
            .iter()
            .filter(|x| x.abs() < epsilon)
            .count()
            .saturating_sub(1)
    }

    /// Node index of the mirror image under `x2 -> -x2`.
    pub fn reflection(&self) -> Vec<usize> {
        let (n1, n2) = (self.n1(), self.n2());
        (0..self.len())
            .map(|p| {
                let (i, j) = (p % n1, p / n1);
                self.index(i, n2 - 1 - j)
            })
            .collect()
    }

    /// Checks the structural invariants every operator relies on.
    pub fn validate(&self) -> Result<()> {
        let increasing = |xs: &[f64]| xs.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.x1) || !increasing(&self.x2) {
            return Err(SolverError::GridError("node coordinates must increase".into()));
        }
        if self.x1.len() <= MIN_INTERVALS || self.x2.len() <= MIN_INTERVALS {
            return Err(SolverError::GridError(format!(
                "need at least {MIN_INTERVALS} intervals per direction"
            )));
        }
        if self.x1[0] != 0.0 || *self.x1.last().unwrap() != 1.0 {
            return Err(SolverError::GridError("x1 nodes must span [0, 1]".into()));
        }
        let n2 = self.n2();
        let symmetric = (0..n2).all(|j| self.x2[j] == -self.x2[n2 - 1 - j]);
        if n2 % 2 == 0 || !symmetric || self.x2[self.midline()] != 0.0 {
            return Err(SolverError::GridError(
                "x2 nodes must be symmetric with a node on the midline".into(),
            ));
        }
        Ok(())
    }
}
