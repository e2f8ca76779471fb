//! Block shift-invert subspace iteration with Rayleigh-Ritz extraction for
//! sparse Hermitian matrices.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::banded::BandedLdl;
use crate::error::{Result, SolverError};
use crate::sparse::{CsrMatrix, Scalar};

/// Residual bound every returned pair satisfies.
pub const RESIDUAL_CONTRACT: f64 = 1e-8;

/// Iterations without a halving of the worst residual that count as stagnation.
const STALL_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Number of wanted eigenpairs.
    pub count: usize,
    /// Extra block vectors that speed up convergence.
    pub guard: usize,
    /// Wanted pairs are the ones whose eigenvalues lie closest to this.
    pub target: f64,
    /// Stop once every wanted residual is below `tol * max(1, |lambda|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl EigenOptions {
    pub fn new(count: usize, target: f64) -> Self {
        Self {
            count,
            guard: count.max(4),
            target,
            tol: 1e-10,
            max_iter: 500,
            seed: 0x5eed,
        }
    }
}

/// Orthogonal projector onto the even or odd part under an index
/// involution.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    mirror: Vec<usize>,
    sign: f64,
}

impl Projector {
    pub fn even(mirror: Vec<usize>) -> Self {
        Self { mirror, sign: 1.0 }
    }

    pub fn odd(mirror: Vec<usize>) -> Self {
        Self { mirror, sign: -1.0 }
    }

    pub fn apply<T: Scalar>(&self, y: &mut [T]) {
        let s = T::from_real(self.sign);
        let half = T::from_real(0.5);
        for i in 0..y.len() {
            let m = self.mirror[i];
            if m > i {
                let a = (y[i] + s * y[m]) * half;
                y[i] = a;
                y[m] = s * a;
            } else if m == i && self.sign < 0.0 {
                y[i] = T::zero();
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs<T> {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unit vectors in the Euclidean norm.
    pub vectors: Vec<Vec<T>>,
    /// `|A v - lambda v|`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Factorization of `A - shift I` reusable across several solves.
pub struct ShiftInvert<'a, T> {
    matrix: &'a CsrMatrix<T>,
    factor: BandedLdl<T>,
    shift: f64,
}

fn dotc<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Two-pass modified Gram-Schmidt; a column that collapses is replaced by
/// a fresh random vector.
fn orthonormalize<T: Scalar>(
    block: &mut [Vec<T>],
    rng: &mut ChaCha8Rng,
    projector: Option<&Projector>,
) {
    for c in 0..block.len() {
        let mut attempts = 0;
        loop {
            let before = norm(&block[c]);
            for _ in 0..2 {
                for b in 0..c {
                    let (done, rest) = block.split_at_mut(c);
                    let proj = dotc(&done[b], &rest[0]);
                    for (x, y) in rest[0].iter_mut().zip(&done[b]) {
                        *x -= proj * *y;
                    }
                }
            }
            let after = norm(&block[c]);
            if after > 1e-10 * before && after > 0.0 {
                let inv = T::from_real(1.0 / after);
                block[c].iter_mut().for_each(|x| *x *= inv);
                break;
            }
            attempts += 1;
            assert!(attempts < 8, "cannot complete an orthonormal block");
            block[c].iter_mut().for_each(|x| *x = T::sample(rng));
            if let Some(p) = projector {
                p.apply(&mut block[c]);
            }
        }
    }
}

impl<'a, T: Scalar> ShiftInvert<'a, T> {
    /// Factors `A - shift I`, nudging the shift down if a pivot vanishes.
    pub fn new(matrix: &'a CsrMatrix<T>, shift: f64) -> Result<Self> {
        let nudge = 1e-7 * matrix.norm_inf().max(1.0);
        let mut last = None;
        for attempt in 0..4 {
            let s = shift - attempt as f64 * nudge;
            match BandedLdl::factor(matrix, s) {
                Ok(factor) => {
                    return Ok(Self {
                        matrix,
                        factor,
                        shift: s,
                    })
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Eigenvalues of `A` below the shift, counted by inertia.
    pub fn count_below(&self) -> usize {
        self.factor.negative_pivots()
    }

    pub fn solve(
        &self,
        opts: &EigenOptions,
        projector: Option<&Projector>,
        start: Option<&[Vec<T>]>,
    ) -> Result<EigenPairs<T>> {
        let n = self.matrix.n();
        let p = (opts.count + opts.guard).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut block: Vec<Vec<T>> = (0..p)
            .map(|c| match start.and_then(|s| s.get(c)) {
                Some(v) if v.len() == n => v.clone(),
                _ => (0..n).map(|_| T::sample(&mut rng)).collect(),
            })
            .collect();
        if let Some(pr) = projector {
            block.iter_mut().for_each(|v| pr.apply(v));
        }
        orthonormalize(&mut block, &mut rng, projector);

        let mut image = vec![vec![T::zero(); n]; p];
        let mut worst = f64::INFINITY;
        let mut history: Vec<f64> = Vec::new();
        for iteration in 1..=opts.max_iter {
            for v in block.iter_mut() {
                self.factor.solve_in_place(v);
                if let Some(pr) = projector {
                    pr.apply(v);
                }
            }
            orthonormalize(&mut block, &mut rng, projector);
            for (v, av) in block.iter().zip(image.iter_mut()) {
                self.matrix.matvec(v, av);
            }

            let mut h = DMatrix::<T>::zeros(p, p);
            for i in 0..p {
                for j in i..p {
                    let hij = dotc(&block[i], &image[j]);
                    h[(i, j)] = hij;
                    h[(j, i)] = hij.conjugate();
                }
                h[(i, i)] = T::from_real(h[(i, i)].real());
            }
            let eig = h.symmetric_eigen();
            let rotate = |vs: &[Vec<T>]| -> Vec<Vec<T>> {
                (0..p)
                    .map(|c| {
                        let mut out = vec![T::zero(); n];
                        for (r, v) in vs.iter().enumerate() {
                            let coef = eig.eigenvectors[(r, c)];
                            for (o, x) in out.iter_mut().zip(v) {
                                *o += coef * *x;
                            }
                        }
                        out
                    })
                    .collect()
            };
            block = rotate(&block);
            image = rotate(&image);

            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&a, &b| {
                (eig.eigenvalues[a] - opts.target)
                    .abs()
                    .total_cmp(&(eig.eigenvalues[b] - opts.target).abs())
            });
            let wanted = &order[..opts.count];
            let residual = |c: usize| -> f64 {
                let theta = T::from_real(eig.eigenvalues[c]);
                let r: Vec<T> = image[c]
                    .iter()
                    .zip(&block[c])
                    .map(|(a, v)| *a - theta * *v)
                    .collect();
                norm(&r)
            };
            let residuals: Vec<f64> = wanted.iter().map(|&c| residual(c)).collect();
            let converged = wanted
                .iter()
                .zip(&residuals)
                .all(|(&c, r)| *r <= opts.tol * eig.eigenvalues[c].abs().max(1.0));
            worst = wanted
                .iter()
                .zip(&residuals)
                .map(|(&c, r)| r / eig.eigenvalues[c].abs().max(1.0))
                .fold(0.0, f64::max);
            let loose = residuals.iter().all(|r| *r < RESIDUAL_CONTRACT);
            // below the contract but stuck at the round-off floor
            let stalled = history.len() >= STALL_WINDOW
                && worst > 0.5 * history[history.len() - STALL_WINDOW];
            history.push(worst);
            if converged || (loose && (stalled || iteration == opts.max_iter)) {
                let mut picked: Vec<(f64, Vec<T>, f64)> = wanted
                    .iter()
                    .zip(residuals)
                    .map(|(&c, r)| (eig.eigenvalues[c], block[c].clone(), r))
                    .collect();
                picked.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut out = EigenPairs {
                    values: Vec::new(),
                    vectors: Vec::new(),
                    residuals: Vec::new(),
                    iterations: iteration,
                };
                for (v, x, r) in picked {
                    out.values.push(v);
                    out.vectors.push(x);
                    out.residuals.push(r);
                }
                return Ok(out);
            }
        }
        Err(SolverError::NoConvergence {
            iterations: opts.max_iter,
            residual: worst,
        })
    }
}

/// One-shot solve for the `count` eigenvalues closest to `target`, using
/// `shift` for the inversion.
pub fn eigen_near<T: Scalar>(
    matrix: &CsrMatrix<T>,
    shift: f64,
    opts: &EigenOptions,
    projector: Option<&Projector>,
) -> Result<EigenPairs<T>> {
    ShiftInvert::new(matrix, shift)?.solve(opts, projector, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Path-graph Laplacian with Neumann ends: eigenvalues 2 - 2 cos(pi k / n).
    fn path(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            t.push((i, i, deg));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn lowest_path_eigenvalues() {
        let n = 200;
        let a = path(n);
        let pairs = eigen_near(&a, -0.01, &EigenOptions::new(4, -0.01), None).unwrap();
        for (k, v) in pairs.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
        assert!(pairs.residuals.iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn interior_eigenvalues_near_target() {
        let n = 120;
        let a = path(n).map(Complex64::from);
        let target = 1.0;
        let pairs = eigen_near(&a, target - 0.01, &EigenOptions::new(2, target), None).unwrap();
        let mut exact: Vec<f64> = (0..n)
            .map(|k| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect();
        exact.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
        let mut want = exact[..2].to_vec();
        want.sort_by(f64::total_cmp);
        for (v, e) in pairs.values.iter().zip(want) {
            assert!((v - e).abs() < 1e-11);
        }
    }

    #[test]
    fn projector_restricts_to_parity() {
        let n = 101;
        let a = path(n);
        let mirror: Vec<usize> = (0..n).map(|i| n - 1 - i).collect();
        let odd = Projector::odd(mirror.clone());
        let pairs = eigen_near(&a, -0.5, &EigenOptions::new(2, -0.5), Some(&odd)).unwrap();
        // odd modes of the path are k = 1, 3, ...
        let exact = |k: f64| 2.0 - 2.0 * (std::f64::consts::PI * k / n as f64).cos();
        assert!((pairs.values[0] - exact(1.0)).abs() < 1e-12);
        assert!((pairs.values[1] - exact(3.0)).abs() < 1e-12);
        let v = &pairs.vectors[0];
        assert!((0..n).all(|i| (v[i] + v[mirror[i]]).abs() < 1e-14));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = path(80);
        let opts = EigenOptions::new(3, 0.0);
        let x = eigen_near(&a, -0.5, &opts, None).unwrap();
        let y = eigen_near(&a, -0.5, &opts, None).unwrap();
        assert_eq!(x.values, y.values);
        assert_eq!(x.vectors, y.vectors);
    }
}
