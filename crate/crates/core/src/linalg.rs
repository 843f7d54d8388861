//! Small dense complex linear algebra used by gates and oracles.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cis, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major data.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length");
        Self { rows, cols, data }
    }

    pub fn diagonal(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Complex::zero(), |a, b| a + b)
    }

    /// Kronecker product `self ⊗ other`; `other` occupies the low-order index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| {
            self[(r / r2, c / c2)] * other[(r % r2, c % c2)]
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn mat_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Frobenius deviation of `self† self` from the identity.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn hermiticity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Checks unitarity to `tol`.
    pub fn check_unitary(&self, tol: T) -> Result<()> {
        let d = self.unitarity_defect();
        if d > tol {
            Err(Error::NotUnitary(d.to_f64_lossy()))
        } else {
            Ok(())
        }
    }

    /// Integer matrix power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// column eigenvectors. Computed in double precision.
    pub fn eigh(&self) -> Result<(Vec<T>, Self)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "eigh needs a square matrix".into(),
            ));
        }
        let n = self.rows;
        let m = DMatrix::<Complex<f64>>::from_fn(n, n, |r, c| {
            let z = self[(r, c)];
            Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
        });
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&j| T::lit(eig.eigenvalues[j])).collect();
        let u = Self::from_fn(n, n, |r, c| {
            let z = eig.eigenvectors[(r, order[c])];
            Complex::new(T::lit(z.re), T::lit(z.im))
        });
        Ok((vals, u))
    }

    /// `exp(i·s·A)` for Hermitian `A`.
    pub fn expi_hermitian(&self, s: T) -> Result<Self> {
        let (vals, u) = self.eigh()?;
        let phases: Vec<Complex<T>> = vals.iter().map(|&l| cis(l * s)).collect();
        Ok(&(&u * &Self::diagonal(&phases)) * &u.adjoint())
    }
}

/// Ascending eigenvalues and column eigenvectors of a real symmetric matrix given
/// row-major, computed in double precision.
pub fn real_symmetric_eigen<T: Real>(n: usize, a: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let m = DMatrix::<f64>::from_fn(n, n, |r, c| a[r * n + c].to_f64_lossy());
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let vals = order.iter().map(|&j| T::lit(eig.eigenvalues[j])).collect();
    let vecs = order
        .iter()
        .map(|&j| (0..n).map(|i| T::lit(eig.eigenvectors[(i, j)])).collect())
        .collect();
    (vals, vecs)
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn kron_puts_second_factor_in_low_bits() {
        let x = CMatrix::from_rows(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let i = CMatrix::<f64>::identity(2);
        let xi = x.kron(&i);
        // X on the high bit maps |00> to |10> (index 2).
        assert_eq!(xi[(2, 0)], c(1., 0.));
        assert_eq!(xi[(1, 0)], c(0., 0.));
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let a = CMatrix::from_rows(
            3,
            3,
            vec![
                c(2., 0.),
                c(0.5, -1.),
                c(0., 0.3),
                c(0.5, 1.),
                c(-1., 0.),
                c(0.2, 0.),
                c(0., -0.3),
                c(0.2, 0.),
                c(0.7, 0.),
            ],
        );
        let (vals, u) = a.eigh().unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        let d = CMatrix::diagonal(&vals.iter().map(|&v| c(v, 0.)).collect::<Vec<_>>());
        let back = &(&u * &d) * &u.adjoint();
        assert!(back.max_abs_diff(&a) < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_handles_degenerate_spectrum() {
        let a = CMatrix::<f64>::identity(4).scale(c(3., 0.));
        let (vals, u) = a.eigh().unwrap();
        assert!(vals.iter().all(|&v| (v - 3.).abs() < 1e-12));
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn expi_of_pauli_z() {
        let z = CMatrix::diagonal(&[c(1., 0.), c(-1., 0.)]);
        let e = z.expi_hermitian(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((e[(0, 0)] - c(0., 1.)).norm() < 1e-14);
        assert!((e[(1, 1)] - c(0., -1.)).norm() < 1e-14);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = CMatrix::from_rows(2, 2, vec![c(0.6, 0.), c(0., 0.8), c(0., 0.8), c(0.6, 0.)]);
        let p5 = a.pow(5);
        let mut acc = CMatrix::identity(2);
        for _ in 0..5 {
            acc = &acc * &a;
        }
        assert!(p5.max_abs_diff(&acc) < 1e-14);
    }

    #[test]
    fn real_symmetric_eigen_sorted() {
        let (vals, vecs) = real_symmetric_eigen(2, &[0.0f64, 1., 1., 0.]);
        assert!((vals[0] + 1.).abs() < 1e-14 && (vals[1] - 1.).abs() < 1e-14);
        assert!((vecs[1][0] - vecs[1][1]).abs() < 1e-14);
    }
}
