//! Banded `L D L^*` factorization of a shifted Hermitian matrix, without
//! pivoting. Used for shift-invert; a vanishing pivot is reported so the
//! caller can move the shift.

use crate::error::{Result, SolverError};
use crate::sparse::{CsrMatrix, Scalar};

pub struct BandedLdl<T> {
    n: usize,
    bw: usize,
    /// Row `i` stores `L[i][i - bw .. i]` at offsets `0..bw`.
    lower: Vec<T>,
    diag: Vec<f64>,
}

impl<T: Scalar> BandedLdl<T> {
    /// Factors `A - shift I`.
    pub fn factor(a: &CsrMatrix<T>, shift: f64) -> Result<Self> {
        let n = a.n();
        let bw = a.bandwidth().max(1);
        let mut lower = vec![T::zero(); n * bw];
        let mut diag = vec![0.0; n];
        let scale = a.norm_inf().max(shift.abs()).max(f64::MIN_POSITIVE);

        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let base = i * bw + bw - i;
            let mut a_ii = -shift;
            for (j, v) in a.row(i) {
                if j < i {
                    lower[base + j] = v;
                } else if j == i {
                    a_ii += v.real();
                }
            }
            for j in lo..i {
                let jlo = j.saturating_sub(bw).max(lo);
                let jbase = j * bw + bw - j;
                let mut acc = lower[base + j];
                for k in jlo..j {
                    acc -= lower[base + k] * T::from_real(diag[k]) * lower[jbase + k].conjugate();
                }
                lower[base + j] = acc * T::from_real(1.0 / diag[j]);
            }
            let mut d = a_ii;
            for k in lo..i {
                d -= lower[base + k].modulus_squared() * diag[k];
            }
            if !(d.abs() > 1e-14 * scale) {
                return Err(SolverError::Factorization { row: i, pivot: d });
            }
            diag[i] = d;
        }
        Ok(Self { n, bw, lower, diag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of negative pivots, which equals the number of eigenvalues
    /// below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }

    /// Overwrites `x` with `(A - shift I)^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [T]) {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let base = i * bw + bw - i;
            let mut acc = x[i];
            for k in lo..i {
                acc -= self.lower[base + k] * x[k];
            }
            x[i] = acc;
        }
        for i in 0..self.n {
            x[i] *= T::from_real(1.0 / self.diag[i]);
        }
        for i in (0..self.n).rev() {
            let lo = i.saturating_sub(bw);
            let base = i * bw + bw - i;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.lower[base + k].conjugate() * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn hermitian_band(n: usize) -> CsrMatrix<Complex64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(4.0 + i as f64 * 0.1, 0.0)));
            for (off, v) in [(1, Complex64::new(-1.0, 0.5)), (3, Complex64::new(0.2, -0.7))] {
                if i + off < n {
                    t.push((i, i + off, v));
                    t.push((i + off, i, v.conj()));
                }
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn solves_indefinite_shifted_system() {
        let a = hermitian_band(40);
        let shift = 4.37;
        let f = BandedLdl::factor(&a, shift).unwrap();
        let b: Vec<Complex64> = (0..40).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut x = b.clone();
        f.solve_in_place(&mut x);
        let mut ax = vec![Complex64::default(); 40];
        a.matvec(&x, &mut ax);
        for i in 0..40 {
            assert!((ax[i] - shift * x[i] - b[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        let a = hermitian_band(30);
        let eig = a.to_dense().symmetric_eigenvalues();
        let shift = 4.71;
        let below = eig.iter().filter(|e| **e < shift).count();
        assert_eq!(BandedLdl::factor(&a, shift).unwrap().negative_pivots(), below);
    }
}
