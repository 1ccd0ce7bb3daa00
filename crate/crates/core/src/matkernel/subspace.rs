use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Residual norm below which a Gram-Schmidt candidate is treated as dependent
/// (relative to `max(1, ||candidate||_F)`).
pub const DROP_TOL: f64 = 1e-10;
/// Relative projection residual below which a matrix counts as a member.
pub const CONTAINS_TOL: f64 = 1e-8;

/// Complex linear span of equally shaped matrices, stored as a
/// Frobenius-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace<T> {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix<T>>,
}

impl<T: Real> Subspace<T> {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self { rows, cols, basis: Vec::new() }
    }

    /// Orthonormal basis of the span of `mats` by modified Gram-Schmidt.
    ///
    /// An empty list yields a zero-dimensional subspace of `1 x 1` matrices;
    /// use [`Subspace::empty`] to fix the shape explicitly.
    pub fn span(mats: &[Matrix<T>]) -> Result<Self> {
        let (rows, cols) = mats.first().map_or((1, 1), |m| m.shape());
        let mut s = Self::empty(rows, cols);
        for m in mats {
            s.insert(m)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Row count of the member matrices (`D` for a subspace of `D x D` matrices).
    pub fn ambient_dim(&self) -> usize {
        self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn basis(&self) -> &[Matrix<T>] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<Matrix<T>> {
        self.basis
    }

    fn check_shape(&self, m: &Matrix<T>) -> Result<()> {
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::Dim(format!(
                "subspace of {}x{} matrices cannot hold a {}x{} matrix",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// `m` minus its orthogonal projection, with one re-orthogonalisation pass.
    fn orthogonal_remainder(&self, m: &Matrix<T>) -> Matrix<T> {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let coeff = b.inner(&r);
                if coeff.norm() == T::zero() {
                    continue;
                }
                r = &r - &b.scale(coeff);
            }
        }
        r
    }

    /// Adds `m` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, m: &Matrix<T>) -> Result<bool> {
        self.check_shape(m)?;
        let r = self.orthogonal_remainder(m);
        let norm = r.frobenius_norm();
        if norm <= T::floor_tol(DROP_TOL) * T::one().max(m.frobenius_norm()) {
            return Ok(false);
        }
        self.basis.push(r.scale_real(T::one() / norm));
        Ok(true)
    }

    pub fn project(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_shape(m)?;
        let mut p = Matrix::zeros(self.rows, self.cols);
        for b in &self.basis {
            p = &p + &b.scale(b.inner(m));
        }
        Ok(p)
    }

    /// `||m - proj(m)||_F / max(1, ||m||_F)`.
    pub fn relative_residual(&self, m: &Matrix<T>) -> Result<T> {
        self.check_shape(m)?;
        let r = self.orthogonal_remainder(m);
        Ok(r.frobenius_norm() / T::one().max(m.frobenius_norm()))
    }

    pub fn contains(&self, m: &Matrix<T>) -> Result<bool> {
        Ok(self.relative_residual(m)? < T::floor_tol(CONTAINS_TOL))
    }

    /// Largest relative residual of `other`'s basis against `self` (0 when `other` is empty).
    pub fn containment_residual(&self, other: &Self) -> Result<T> {
        other.basis.iter().try_fold(T::zero(), |acc, b| Ok(acc.max(self.relative_residual(b)?)))
    }

    /// Gram matrix deviation from the identity, max entry modulus.
    pub fn orthonormality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let g = a.inner(b);
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g - num_complex::Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }
}

/// Convenience for [`Subspace::span`].
pub fn span_basis<T: Real>(mats: &[Matrix<T>]) -> Result<Subspace<T>> {
    Subspace::span(mats)
}

/// Convenience for [`Subspace::contains`].
pub fn subspace_contains<T: Real>(s: &Subspace<T>, m: &Matrix<T>) -> Result<bool> {
    s.contains(m)
}
