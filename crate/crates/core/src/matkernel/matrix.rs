use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dim(format!("matrix shape {rows}x{cols} must be positive")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn from_complex(rows: &[&[(f64, f64)]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| Complex::new(T::lit(rows[i][j].0), T::lit(rows[i][j].1)))
    }

    pub fn diag(values: &[C<T>]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex::zero() })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C<T>> = values.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect();
        Self::diag(&v)
    }

    /// Matrix unit `E_ij` of an `n x n` algebra.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::unit_rect(n, n, i, j)
    }

    pub fn unit_rect(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = Complex::one();
        m
    }

    /// Column vector from entries.
    pub fn column(entries: Vec<C<T>>) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C<T>> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Hilbert-Schmidt inner product `tr(self^dagger other)`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Frobenius distance `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "distance between differently shaped matrices");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn checked_zip(&self, rhs: &Self, op: &str, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dim(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_zip(rhs, "add", |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_zip(rhs, "subtract", |a, b| a - b)
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Frobenius norm of `M - M^dagger`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.distance(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Frobenius norm of `M^dagger M - I`.
    pub fn unitarity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.adjoint() * self).distance(&Self::identity(self.cols))
    }

    /// Copy of the `rows x cols` sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Places `self` into a zero `rows x cols` matrix with its top-left corner at `(r0, c0)`.
    pub fn embed_block(&self, rows: usize, cols: usize, r0: usize, c0: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(r0 + i, c0 + j)] = self[(i, j)];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }

    /// Converts the scalar type through f64.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:+.4?}{:+.4?}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix<f64>;

    #[test]
    fn adjoint_is_an_exact_involution() {
        let m = M::from_complex(&[&[(1.0, 2.0), (0.3, -0.7)], &[(-1.5, 0.1), (0.0, 9.0)], &[(2.0, 2.0), (1e-300, -3.0)]]);
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().shape(), (2, 3));
    }

    #[test]
    fn new_rejects_wrong_length() {
        assert_eq!(M::new(2, 2, vec![Complex::zero(); 3]).unwrap_err().code(), "E_DIM");
        assert_eq!(M::new(0, 2, vec![]).unwrap_err().code(), "E_DIM");
    }

    #[test]
    fn multiplication_and_shape_errors() {
        let a = M::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = M::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(&a * &b, M::from_real(&[&[2.0, 1.0], &[4.0, 3.0]]));
        assert!(a.checked_mul(&M::zeros(3, 1)).is_err());
        assert!(a.checked_add(&M::zeros(3, 1)).is_err());
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_slot() {
        let a = M::from_complex(&[&[(0.0, 1.0)]]);
        let b = M::from_complex(&[&[(2.0, 0.0)]]);
        assert_eq!(a.inner(&b), Complex::new(0.0, -2.0));
        assert_eq!(a.inner(&a).re, 1.0);
    }

    #[test]
    fn blocks_round_trip() {
        let h = M::from_real(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let big = h.embed_block(4, 4, 2, 0);
        assert_eq!(big.block(2, 0, 2, 2), h);
        assert_eq!(big.frobenius_norm(), 2.0);
    }

    #[test]
    fn unitarity_residual_of_scaled_identity() {
        let m = M::identity(2).scale_real(2.0);
        assert!((m.unitarity_residual() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(M::identity(3).unitarity_residual(), 0.0);
    }
}
