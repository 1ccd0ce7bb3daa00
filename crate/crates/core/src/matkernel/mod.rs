//! Dense complex linear algebra: matrices, Kronecker products, partial
//! traces, a Hermitian eigensolver and subspaces of matrices.

mod eigen;
mod matrix;
mod subspace;
mod tensor;

pub use eigen::{hermitian_eigen, is_psd, HermitianEigen};
pub use matrix::Matrix;
pub use subspace::{span_basis, subspace_contains, Subspace, CONTAINS_TOL, DROP_TOL};
pub use tensor::{basis_vector, factor_permutation, pad_identity, partial_trace, tensor, tensor_all};
