use num_complex::Complex;
use num_traits::{One, Zero};

use super::{KrausMap, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::{hermitian_eigen, tensor, Matrix};
use crate::scalar::Real;

/// Choi matrix of a linear map, `sum_ij E_ij (x) Phi(E_ij)`.
///
/// Entry `((i * out + k), (j * out + l))` is `Phi(E_ij)[k, l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix<T> {
    in_dim: usize,
    out_dim: usize,
    choi: Matrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn new(in_dim: usize, out_dim: usize, choi: Matrix<T>) -> Result<Self> {
        let n = in_dim * out_dim;
        if n == 0 || choi.shape() != (n, n) {
            return Err(Error::Dim(format!(
                "Choi matrix for {in_dim} -> {out_dim} must be {n}x{n}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self { in_dim, out_dim, choi })
    }

    /// Assembles the Choi matrix from images of `E_ij`, ordered `[i * in_dim + j]`.
    pub fn from_unit_images(in_dim: usize, out_dim: usize, images: &[Matrix<T>]) -> Result<Self> {
        if images.len() != in_dim * in_dim {
            return Err(Error::Dim(format!("expected {} unit images, got {}", in_dim * in_dim, images.len())));
        }
        let mut choi = Matrix::zeros(in_dim * out_dim, in_dim * out_dim);
        for (k, img) in images.iter().enumerate() {
            if img.shape() != (out_dim, out_dim) {
                return Err(Error::Dim(format!("unit image must be {out_dim}x{out_dim}")));
            }
            let unit = Matrix::unit(in_dim, k / in_dim, k % in_dim);
            choi = &choi + &tensor(&unit, img);
        }
        Ok(Self { in_dim, out_dim, choi })
    }

    /// Choi matrix of `rho -> f(rho)`, evaluated on matrix units.
    pub fn from_fn(in_dim: usize, out_dim: usize, f: impl Fn(&Matrix<T>) -> Result<Matrix<T>>) -> Result<Self> {
        let images = (0..in_dim * in_dim)
            .map(|k| f(&Matrix::unit(in_dim, k / in_dim, k % in_dim)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_unit_images(in_dim, out_dim, &images)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.choi
    }

    /// `||C - C'||_F`, the metric for map equality.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return Err(Error::Dim(format!(
                "cannot compare maps {} -> {} and {} -> {}",
                self.in_dim, self.out_dim, other.in_dim, other.out_dim
            )));
        }
        Ok(self.choi.distance(&other.choi))
    }

    pub fn scale(&self, s: T) -> Self {
        Self { in_dim: self.in_dim, out_dim: self.out_dim, choi: self.choi.scale_real(s) }
    }

    /// Choi matrix of the trace-dual map.
    pub fn dual(&self) -> Self {
        let (n, m) = (self.in_dim, self.out_dim);
        // dual(E_kl)[i, j] = Phi(E_ji)[l, k]
        let choi = Matrix::from_fn(n * m, n * m, |r, c| {
            let (k, i) = (r / n, r % n);
            let (l, j) = (c / n, c % n);
            self.choi[(j * m + l, i * m + k)]
        });
        Self { in_dim: m, out_dim: n, choi }
    }

    /// Choi criterion: PSD Choi matrix within `tol`.
    pub fn is_completely_positive(&self, tol: T) -> bool {
        if !self.choi.is_hermitian(tol) {
            return false;
        }
        hermitian_eigen(&self.choi).map(|e| e.min_value() >= -tol).unwrap_or(false)
    }

    /// Spectral Kraus extraction.
    ///
    /// Eigenpairs with `lambda > tol` become `sqrt(lambda) * reshape(v)`, in
    /// descending eigenvalue order, each rotated so its first significant
    /// entry is real positive. A map with no such eigenvalue yields a single
    /// zero operator.
    pub fn kraus_from_choi(&self, tol: T) -> Result<KrausMap<T>> {
        self.spectral_kraus(tol, tol)
    }

    /// As [`Self::kraus_from_choi`] with separate slack for the positivity
    /// check and cutoff for keeping eigenpairs.
    pub(crate) fn spectral_kraus(&self, tol: T, keep: T) -> Result<KrausMap<T>> {
        let dev = self.choi.hermiticity_residual();
        if dev > tol {
            return Err(Error::NotCp(dev.as_f64()));
        }
        let eig = hermitian_eigen(&self.choi)?;
        if eig.min_value() < -tol {
            return Err(Error::NotCp(eig.min_value().as_f64()));
        }
        let (n, m) = (self.in_dim, self.out_dim);
        let mut kraus = Vec::new();
        for k in (0..eig.values.len()).rev() {
            let lambda = eig.values[k];
            if lambda <= keep {
                break;
            }
            let s = lambda.sqrt();
            let mut a = Matrix::from_fn(m, n, |row, col| eig.vectors[(col * m + row, k)] * s);
            let cutoff = a.max_abs() * T::floor_tol(1e-8);
            if let Some(z) = a.data().iter().copied().find(|z| z.norm() > cutoff) {
                a = a.scale(z.conj() / z.norm());
            }
            kraus.push(a);
        }
        if kraus.is_empty() {
            kraus.push(Matrix::zeros(m, n));
        }
        KrausMap::from_parts_unchecked(n, m, kraus)
    }
}

impl<T: Real> LinearMap<T> for ChoiMatrix<T> {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `Phi(rho)[k, l] = sum_ij rho_ij C[(i,k), (j,l)]`.
    fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>> {
        let (n, m) = (self.in_dim, self.out_dim);
        if rho.shape() != (n, n) {
            return Err(Error::Dim(format!("map expects {n}x{n} input, got {}x{}", rho.rows(), rho.cols())));
        }
        let mut out = Matrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                let r = rho[(i, j)];
                if r.is_zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(k, l)] += r * self.choi[(i * m + k, j * m + l)];
                    }
                }
            }
        }
        Ok(out)
    }

    fn to_choi(&self) -> Result<ChoiMatrix<T>> {
        Ok(self.clone())
    }
}

/// Choi matrix of the transpose map on `M_d` (the SWAP operator).
pub fn transpose_choi<T: Real>(d: usize) -> ChoiMatrix<T> {
    let choi = Matrix::from_fn(d * d, d * d, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        if i == l && j == k {
            Complex::one()
        } else {
            Complex::zero()
        }
    });
    ChoiMatrix { in_dim: d, out_dim: d, choi }
}
