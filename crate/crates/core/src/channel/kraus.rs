use num_complex::Complex;
use num_traits::{One, Zero};

use super::{ChoiMatrix, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::{hermitian_eigen, Matrix};
use crate::scalar::{Real, C};

/// CP map in operator-sum form, every operator `out_dim x in_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausMap<T> {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Matrix<T>>,
}

impl<T: Real> KrausMap<T> {
    /// Validates shapes. Families longer than `in_dim * out_dim` are replaced
    /// by their canonical spectral form.
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<Matrix<T>>) -> Result<Self> {
        let map = Self::from_parts_unchecked(in_dim, out_dim, kraus)?;
        if map.kraus.len() > in_dim * out_dim {
            return map.canonical();
        }
        Ok(map)
    }

    /// Shape-checked constructor that keeps the family as given, whatever its length.
    pub(crate) fn from_parts_unchecked(in_dim: usize, out_dim: usize, kraus: Vec<Matrix<T>>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Dim("map dimensions must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::Dim("a Kraus family needs at least one operator".into()));
        }
        if let Some(bad) = kraus.iter().find(|a| a.shape() != (out_dim, in_dim)) {
            return Err(Error::Dim(format!(
                "Kraus operator is {}x{}, expected {out_dim}x{in_dim}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    /// Infers dimensions from the first operator.
    pub fn from_kraus(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let (out_dim, in_dim) =
            kraus.first().map(|a| a.shape()).ok_or_else(|| Error::Dim("empty Kraus family".into()))?;
        Self::new(in_dim, out_dim, kraus)
    }

    /// `rho -> U rho U^dagger`.
    pub fn conjugation(u: Matrix<T>) -> Self {
        let (out_dim, in_dim) = u.shape();
        Self { in_dim, out_dim, kraus: vec![u] }
    }

    pub fn identity(d: usize) -> Self {
        Self::conjugation(Matrix::identity(d))
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<Matrix<T>> {
        self.kraus
    }

    /// `||sum_i A_i^dagger A_i - I_in||_F`.
    pub fn trace_preservation_residual(&self) -> T {
        gram_sum(&self.kraus, true).distance(&Matrix::identity(self.in_dim))
    }

    /// `||sum_i A_i A_i^dagger - I_out||_F`.
    pub fn unitality_residual(&self) -> T {
        gram_sum(&self.kraus, false).distance(&Matrix::identity(self.out_dim))
    }

    pub fn is_trace_preserving(&self, tol: T) -> bool {
        self.trace_preservation_residual() < tol
    }

    pub fn is_unital(&self, tol: T) -> bool {
        self.unitality_residual() < tol
    }

    /// Trace dual, Kraus family `{A_i^dagger}`.
    pub fn dual(&self) -> Self {
        Self { in_dim: self.out_dim, out_dim: self.in_dim, kraus: self.kraus.iter().map(Matrix::adjoint).collect() }
    }

    /// `sum_a vec(A_a) vec(A_a)^dagger` with `vec(A)[i * out + k] = A[k, i]`.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let (n, m) = (self.in_dim, self.out_dim);
        let mut c = Matrix::zeros(n * m, n * m);
        for a in &self.kraus {
            let v: Vec<C<T>> = (0..n * m).map(|r| a[(r % m, r / m)]).collect();
            for (r, vr) in v.iter().enumerate() {
                if vr.is_zero() {
                    continue;
                }
                for (s, vs) in v.iter().enumerate() {
                    c[(r, s)] += vr * vs.conj();
                }
            }
        }
        ChoiMatrix::new(n, m, c).expect("shape fixed by construction")
    }

    /// Canonical spectral Kraus form of the same map.
    pub fn canonical(&self) -> Result<Self> {
        let choi = self.choi();
        let tol = T::floor_tol(1e-12) * T::one().max(choi.matrix().frobenius_norm());
        choi.kraus_from_choi(tol)
    }

    /// `||choi(self) - choi(other)||_F`.
    pub fn choi_distance(&self, other: &Self) -> Result<T> {
        self.choi().distance(&other.choi())
    }

    /// `sum_k w_k Phi_k` for non-negative weights, as the union of `sqrt(w_k)`-scaled families.
    pub fn convex_combination(parts: &[(T, &Self)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| Error::Dim("empty combination".into()))?;
        let mut kraus = Vec::new();
        for (w, map) in parts {
            if (map.in_dim, map.out_dim) != (first.in_dim, first.out_dim) {
                return Err(Error::Dim("cannot combine maps of different shapes".into()));
            }
            if *w < T::zero() {
                return Err(Error::Dim("negative weight in convex combination".into()));
            }
            let s = w.sqrt();
            kraus.extend(map.kraus.iter().map(|a| a.scale_real(s)));
        }
        Self::new(first.in_dim, first.out_dim, kraus)
    }
}

fn gram_sum<T: Real>(kraus: &[Matrix<T>], adjoint_first: bool) -> Matrix<T> {
    let mut acc: Option<Matrix<T>> = None;
    for a in kraus {
        let term = if adjoint_first { &a.adjoint() * a } else { a * &a.adjoint() };
        acc = Some(match acc {
            Some(s) => &s + &term,
            None => term,
        });
    }
    acc.expect("non-empty family")
}

impl<T: Real> LinearMap<T> for KrausMap<T> {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::Dim(format!(
                "map expects {0}x{0} input, got {1}x{2}",
                self.in_dim,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = Matrix::zeros(self.out_dim, self.out_dim);
        for a in &self.kraus {
            out = &out + &(&(a * rho) * &a.adjoint());
        }
        Ok(out)
    }

    fn to_choi(&self) -> Result<ChoiMatrix<T>> {
        Ok(self.choi())
    }
}

/// `second after first`: Kraus family `{B_j A_i}`, canonicalised when it
/// exceeds the `in * out` length bound.
pub fn compose<T: Real>(second: &KrausMap<T>, first: &KrausMap<T>) -> Result<KrausMap<T>> {
    if first.out_dim != second.in_dim {
        return Err(Error::Dim(format!(
            "cannot compose {} -> {} after {} -> {}",
            second.in_dim, second.out_dim, first.in_dim, first.out_dim
        )));
    }
    let kraus = second.kraus.iter().flat_map(|b| first.kraus.iter().map(move |a| b * a)).collect();
    KrausMap::new(first.in_dim, second.out_dim, kraus)
}

fn vectorize<T: Real>(a: &Matrix<T>) -> Vec<C<T>> {
    let m = a.rows();
    (0..a.rows() * a.cols()).map(|r| a[(r % m, r / m)]).collect()
}

fn dot<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    u.iter().zip(v).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

/// Completes orthonormal columns of `x` (n x r) to a list of `n - r` further orthonormal columns.
fn complement<T: Real>(x: &Matrix<T>) -> Vec<Vec<C<T>>> {
    let (n, r) = x.shape();
    let mut cols: Vec<Vec<C<T>>> = (0..r).map(|k| (0..n).map(|i| x[(i, k)]).collect()).collect();
    let mut extra = Vec::new();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v: Vec<C<T>> = (0..n).map(|i| if i == e { Complex::one() } else { Complex::zero() }).collect();
        for _ in 0..2 {
            for c in &cols {
                let p = dot(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-6) {
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

/// Unitary `U` with `A_i = sum_j u_ij A'_j` for two Kraus families of the same map.
///
/// Shorter families are padded with zero operators. Both families are
/// expanded in the spectral factorisation of their common Choi matrix,
/// `a = X K` and `b = Y K` with isometries `X`, `Y`; then
/// `U = X Y^dagger + X_perp Y_perp^dagger`. Returns `None` when the Choi
/// matrices differ by more than `tol`, or when the recovered `U` does not
/// satisfy the relation to `1e-8`.
pub fn kraus_equivalence<T: Real>(a: &KrausMap<T>, b: &KrausMap<T>, tol: T) -> Result<Option<Matrix<T>>> {
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim) {
        return Err(Error::Dim(format!(
            "cannot compare maps {} -> {} and {} -> {}",
            a.in_dim, a.out_dim, b.in_dim, b.out_dim
        )));
    }
    let choi = a.choi();
    if choi.distance(&b.choi())? > tol {
        return Ok(None);
    }
    let n = a.kraus.len().max(b.kraus.len());
    let pad = |m: &KrausMap<T>| {
        let mut v: Vec<Vec<C<T>>> = m.kraus.iter().map(vectorize).collect();
        v.resize(n, vec![Complex::zero(); a.in_dim * a.out_dim]);
        v
    };
    let (va, vb) = (pad(a), pad(b));

    let eig = hermitian_eigen(choi.matrix())?;
    let cutoff = T::floor_tol(1e-10) * T::one().max(eig.max_value());
    let range: Vec<usize> = (0..eig.values.len()).rev().filter(|&k| eig.values[k] > cutoff).collect();
    let r = range.len();
    let u = if r == 0 {
        // both families are entirely zero
        Matrix::identity(n)
    } else {
        let coords = |vs: &[Vec<C<T>>]| {
            Matrix::from_fn(n, r, |i, k| {
                let col = range[k];
                let w: Vec<C<T>> = (0..eig.vectors.rows()).map(|row| eig.vectors[(row, col)]).collect();
                dot(&w, &vs[i]) / eig.values[col].sqrt()
            })
        };
        let (x, y) = (coords(&va), coords(&vb));
        let mut u = &x * &y.adjoint();
        for (cx, cy) in complement(&x).iter().zip(&complement(&y)) {
            for i in 0..n {
                for j in 0..n {
                    u[(i, j)] += cx[i] * cy[j].conj();
                }
            }
        }
        u
    };

    let worst = (0..n)
        .map(|i| {
            let mut mix: Vec<Complex<T>> = vec![Complex::zero(); va[0].len()];
            for j in 0..n {
                for (m, bj) in mix.iter_mut().zip(&vb[j]) {
                    *m += u[(i, j)] * bj;
                }
            }
            mix.iter().zip(&va[i]).map(|(p, q)| (*p - *q).norm_sqr()).sum::<T>().sqrt()
        })
        .fold(T::zero(), T::max);
    let bound = T::floor_tol(1e-8);
    if worst < bound && u.unitarity_residual() < bound {
        Ok(Some(u))
    } else {
        Ok(None)
    }
}
