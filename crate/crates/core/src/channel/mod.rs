//! Completely positive maps between matrix algebras.
//!
//! A map is stored either as a Kraus family `rho -> sum_i A_i rho A_i^dagger`
//! ([`KrausMap`]) or as its Choi matrix `sum_ij E_ij (x) Phi(E_ij)` with the
//! input factor first ([`ChoiMatrix`]).

mod choi;
mod embedding;
mod kraus;

pub use choi::{transpose_choi, ChoiMatrix};
pub use embedding::{embed, embedding_map, reduce_map, restrict_input, restrict_output, ReductionMode, TensorLayout};
pub use kraus::{compose, kraus_equivalence, KrausMap};

use crate::error::Result;
use crate::matkernel::Matrix;
use crate::scalar::Real;

/// Linear map `B(H_in) -> B(H_out)`.
pub trait LinearMap<T: Real> {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn apply(&self, rho: &Matrix<T>) -> Result<Matrix<T>>;

    /// Images of the matrix units `E_ij`, indexed `[i * in_dim + j]`.
    fn unit_images(&self) -> Result<Vec<Matrix<T>>> {
        let n = self.in_dim();
        (0..n * n).map(|k| self.apply(&Matrix::unit(n, k / n, k % n))).collect()
    }

    fn to_choi(&self) -> Result<ChoiMatrix<T>> {
        ChoiMatrix::from_unit_images(self.in_dim(), self.out_dim(), &self.unit_images()?)
    }
}

/// `Psi(E_ij) Psi(E_kl) = delta_jk Psi(E_il)` and `Psi(E_ij)^dagger = Psi(E_ji)` on all matrix units.
pub fn star_homomorphism_residual<T: Real, M: LinearMap<T> + ?Sized>(map: &M) -> Result<T> {
    let n = map.in_dim();
    let images = map.unit_images()?;
    let zero = Matrix::zeros(map.out_dim(), map.out_dim());
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a = &images[i * n + j];
            worst = worst.max(a.adjoint().distance(&images[j * n + i]));
            for k in 0..n {
                for l in 0..n {
                    let prod = a * &images[k * n + l];
                    let expected = if j == k { &images[i * n + l] } else { &zero };
                    worst = worst.max(prod.distance(expected));
                }
            }
        }
    }
    Ok(worst)
}

pub fn is_star_homomorphism<T: Real, M: LinearMap<T> + ?Sized>(map: &M, tol: T) -> Result<bool> {
    Ok(star_homomorphism_residual(map)? < tol)
}
