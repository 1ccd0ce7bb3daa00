//! Completely positive maps on directed graphs.
//!
//! Vertices carry finite-dimensional state spaces and edges carry
//! completely positive maps. The crate checks the Cuntz-Krieger relations
//! for graph families, the quantum causal history axioms for instances built
//! by hand or from quantum circuits, and builds the operator algebra
//! generated by vertex projections and Kraus operators together with its
//! block structure.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which the verification tolerances assume.

pub mod algebra;
pub mod causal;
pub mod channel;
pub mod circuit;
pub mod error;
pub mod format;
pub mod matkernel;
pub mod qch;
pub mod report;
pub mod scalar;
pub mod tolerance;

pub use causal::{AcausalSet, CausalGraph, Edge, Relation, Vertex};
pub use channel::{ChoiMatrix, KrausMap, LinearMap, ReductionMode, TensorLayout};
pub use error::{Error, Result};
pub use matkernel::{Matrix, Subspace};
pub use report::{Check, Report};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub type ComplexMatrix = Matrix<f64>;
pub type ComplexMatrix32 = Matrix<f32>;
pub type MatrixSubspace = Subspace<f64>;
pub type KrausChannel = KrausMap<f64>;
pub type Superoperator = ChoiMatrix<f64>;
pub type QchInstance = qch::Qch<f64>;
pub type CkFamily = algebra::CkFamily<f64>;
pub type GeneratedAlgebra = algebra::Algebra<f64>;
pub type CircuitSpec = circuit::Circuit<f64>;
