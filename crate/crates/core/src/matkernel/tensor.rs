//! Kronecker products and partial traces over ordered tensor factors.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Kronecker product: entry `(i*rb + k, j*cb + l)` is `a[i,j] * b[k,l]`.
pub fn tensor<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (rb, cb) = b.shape();
    Matrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Left-to-right Kronecker product of a non-empty list.
pub fn tensor_all<T: Real>(factors: &[Matrix<T>]) -> Matrix<T> {
    let (first, rest) = factors.split_first().expect("tensor_all of an empty list");
    rest.iter().fold(first.clone(), |acc, f| tensor(&acc, f))
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn check_factors(n: usize, dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::Dim("tensor factor of dimension 0".into()));
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::Dim(format!("factor dims {dims:?} multiply to {total}, matrix has size {n}")));
    }
    Ok(())
}

/// Traces out every factor not listed in `keep`. Kept factors stay in ascending order.
pub fn partial_trace<T: Real>(m: &Matrix<T>, factor_dims: &[usize], keep: &[usize]) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::Dim(format!("partial trace of non-square {}x{} matrix", m.rows(), m.cols())));
    }
    check_factors(m.rows(), factor_dims)?;
    let mut kept = vec![false; factor_dims.len()];
    for &k in keep {
        if k >= factor_dims.len() {
            return Err(Error::Dim(format!("kept factor {k} out of range for {} factors", factor_dims.len())));
        }
        kept[k] = true;
    }
    let out_dim: usize = factor_dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let mut out = Matrix::zeros(out_dim, out_dim);
    let n = factor_dims.len();
    let (mut dr, mut dc) = (vec![0; n], vec![0; n]);
    for r in 0..m.rows() {
        digits(r, factor_dims, &mut dr);
        for c in 0..m.cols() {
            digits(c, factor_dims, &mut dc);
            if (0..n).any(|f| !kept[f] && dr[f] != dc[f]) {
                continue;
            }
            let (mut orow, mut ocol) = (0, 0);
            for f in (0..n).filter(|&f| kept[f]) {
                orow = orow * factor_dims[f] + dr[f];
                ocol = ocol * factor_dims[f] + dc[f];
            }
            out[(orow, ocol)] += m[(r, c)];
        }
    }
    Ok(out)
}

/// Unitary permutation matrix sending factor `f` of the input ordering to position `perm[f]`.
pub fn factor_permutation<T: Real>(factor_dims: &[usize], perm: &[usize]) -> Result<Matrix<T>> {
    let n = factor_dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Dim(format!("{perm:?} is not a permutation of {n} factors")));
    }
    let mut new_dims = vec![0; n];
    for f in 0..n {
        new_dims[perm[f]] = factor_dims[f];
    }
    let total: usize = factor_dims.iter().product();
    let mut out = Matrix::zeros(total, total);
    let mut d = vec![0; n];
    for col in 0..total {
        digits(col, factor_dims, &mut d);
        let mut nd = vec![0; n];
        for f in 0..n {
            nd[perm[f]] = d[f];
        }
        let row = nd.iter().zip(&new_dims).fold(0, |acc, (&x, &dim)| acc * dim + x);
        out[(row, col)] = Complex::one();
    }
    Ok(out)
}

/// `I_before (x) m (x) I_after`.
pub fn pad_identity<T: Real>(m: &Matrix<T>, before: usize, after: usize) -> Matrix<T> {
    let mut out = m.clone();
    if before > 1 {
        out = tensor(&Matrix::identity(before), &out);
    }
    if after > 1 {
        out = tensor(&out, &Matrix::identity(after));
    }
    out
}

/// Computational basis column `|k>` of dimension `n`.
pub fn basis_vector<T: Real>(n: usize, k: usize) -> Matrix<T> {
    let mut v = vec![Complex::zero(); n];
    v[k] = Complex::one();
    Matrix::column(v)
}
