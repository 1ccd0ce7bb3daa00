//! Cyclic Jacobi eigensolver for dense Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = V diag(values) V^dagger`, eigenvalues ascending,
/// eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Eigenvector for `values[k]` as a column.
    pub fn vector(&self, k: usize) -> Matrix<T> {
        self.vectors.block(0, k, self.vectors.rows(), 1)
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_value(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalises the Hermitian part of `m`.
///
/// Sweeps over all `(p, q)` pairs in fixed order until the off-diagonal
/// Frobenius norm drops below `1e-12 * ||m||_F`. The procedure is fully
/// deterministic.
pub fn hermitian_eigen<T: Real>(m: &Matrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::Dim(format!("eigendecomposition of non-square {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let threshold = T::floor_tol(1e-12) * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p, q]`.
///
/// The rotation is `J = diag(1, e^{-i phi}) R(theta)` on coordinates `(p, q)`,
/// where `phi = arg a[p, q]` turns the pivot real and `R` is the classical
/// real symmetric Jacobi rotation.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g.is_zero() {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let two = T::lit(2.0);
    let tau = (aqq - app) / (two * g);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let cs = T::one() / (T::one() + t * t).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    let j_pp = Complex::new(cs, T::zero());
    let j_pq = Complex::new(sn, T::zero());
    let j_qp = ph * (-sn);
    let j_qq = ph * cs;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Positive semidefiniteness test: Hermitian within `tol` and smallest eigenvalue at least `-tol`.
pub fn is_psd<T: Real>(m: &Matrix<T>, tol: T) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dim(format!("PSD test on non-square {}x{} matrix", m.rows(), m.cols())));
    }
    let dev = m.hermiticity_residual();
    if dev > tol {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    Ok(hermitian_eigen(m)?.min_value() >= -tol)
}
