//! Unital embeddings `A(x) -> A(xi)` into tensor products and reductions of
//! maps between composite systems.

use serde::{Deserialize, Serialize};

use super::{ChoiMatrix, KrausMap, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::{basis_vector, pad_identity, partial_trace, tensor_all, Matrix};
use crate::scalar::Real;
use crate::tolerance;

/// Ordered tensor factors `H(x_1) (x) ... (x) H(x_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    ids: Vec<String>,
    dims: Vec<usize>,
}

impl TensorLayout {
    pub fn new(ids: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if ids.is_empty() || ids.len() != dims.len() {
            return Err(Error::Dim(format!("layout needs matching non-empty ids and dims, got {ids:?} / {dims:?}")));
        }
        if dims.contains(&0) {
            return Err(Error::Dim("tensor factor of dimension 0".into()));
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(Error::Dim(format!("factor `{id}` listed twice")));
            }
        }
        Ok(Self { ids, dims })
    }

    pub fn single(id: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(vec![id.into()], vec![dim])
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| Error::Vertex(id.to_string()))
    }

    /// Product of the dims before and after factor `pos`.
    fn surroundings(&self, pos: usize) -> (usize, usize) {
        (self.dims[..pos].iter().product(), self.dims[pos + 1..].iter().product())
    }
}

/// How the complementary factors are filled when restricting a map's input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    /// `rho -> rho (x) 1`, the unital embedding itself.
    Raw,
    /// `rho -> rho (x) 1/d`, trace preserving.
    Channel,
}

/// `iota_x(rho) = 1 (x) rho (x) 1` with factors in layout order.
pub fn embed<T: Real>(rho: &Matrix<T>, x: &str, layout: &TensorLayout) -> Result<Matrix<T>> {
    let pos = layout.position(x)?;
    let d = layout.dims[pos];
    if rho.shape() != (d, d) {
        return Err(Error::Dim(format!("`{x}` has dimension {d}, operator is {}x{}", rho.rows(), rho.cols())));
    }
    let (before, after) = layout.surroundings(pos);
    Ok(pad_identity(rho, before, after))
}

/// `iota_x` as a Kraus map: operators `e_u (x) I_x (x) e_w` over basis vectors of the other factors.
pub fn embedding_map<T: Real>(x: &str, layout: &TensorLayout) -> Result<KrausMap<T>> {
    let pos = layout.position(x)?;
    let d = layout.dims[pos];
    let (before, after) = layout.surroundings(pos);
    let mut kraus = Vec::with_capacity(before * after);
    for u in 0..before {
        for w in 0..after {
            kraus.push(tensor_all(&[basis_vector(before, u), Matrix::identity(d), basis_vector(after, w)]));
        }
    }
    KrausMap::from_parts_unchecked(d, layout.total_dim(), kraus)
}

fn reduce_general<T: Real, M: LinearMap<T> + ?Sized>(
    map: &M,
    input: Option<(&str, &TensorLayout)>,
    output: Option<(&str, &TensorLayout)>,
    mode: ReductionMode,
) -> Result<KrausMap<T>> {
    if let Some((_, l)) = input {
        if l.total_dim() != map.in_dim() {
            return Err(Error::Dim(format!("input layout has dimension {}, map expects {}", l.total_dim(), map.in_dim())));
        }
    }
    if let Some((_, l)) = output {
        if l.total_dim() != map.out_dim() {
            return Err(Error::Dim(format!("output layout has dimension {}, map produces {}", l.total_dim(), map.out_dim())));
        }
    }
    let in_dim = match input {
        Some((x, l)) => l.dims[l.position(x)?],
        None => map.in_dim(),
    };
    let out_dim = match output {
        Some((y, l)) => l.dims[l.position(y)?],
        None => map.out_dim(),
    };
    let scale = match (input, mode) {
        (Some((_, l)), ReductionMode::Channel) => T::lit(in_dim as f64) / T::lit(l.total_dim() as f64),
        _ => T::one(),
    };
    let choi = ChoiMatrix::from_fn(in_dim, out_dim, |unit| {
        let lifted = match input {
            Some((x, l)) => embed(unit, x, l)?.scale_real(scale),
            None => unit.clone(),
        };
        let image = map.apply(&lifted)?;
        match output {
            Some((y, l)) => partial_trace(&image, &l.dims, &[l.position(y)?]),
            None => Ok(image),
        }
    })?;
    let keep = T::floor_tol(1e-12) * T::one().max(choi.matrix().frobenius_norm());
    choi.spectral_kraus(T::floor_tol(tolerance::PSD), keep)
}

/// Reduction of `map: A(xi) -> A(zeta)` to `A(x) -> A(y)`:
/// `rho -> tr_{zeta \ y} map(lift(rho))`, where `lift` is `iota_x` in
/// [`ReductionMode::Raw`] and `rho (x) 1/d` in [`ReductionMode::Channel`].
pub fn reduce_map<T: Real, M: LinearMap<T> + ?Sized>(
    map: &M,
    x: &str,
    xi: &TensorLayout,
    y: &str,
    zeta: &TensorLayout,
    mode: ReductionMode,
) -> Result<KrausMap<T>> {
    reduce_general(map, Some((x, xi)), Some((y, zeta)), mode)
}

/// Restricts only the input side, keeping the full output algebra.
pub fn restrict_input<T: Real, M: LinearMap<T> + ?Sized>(
    map: &M,
    x: &str,
    xi: &TensorLayout,
    mode: ReductionMode,
) -> Result<KrausMap<T>> {
    reduce_general(map, Some((x, xi)), None, mode)
}

/// Compresses only the output side: `rho -> tr_{zeta \ y} map(rho)`.
pub fn restrict_output<T: Real, M: LinearMap<T> + ?Sized>(map: &M, y: &str, zeta: &TensorLayout) -> Result<KrausMap<T>> {
    reduce_general(map, None, Some((y, zeta)), ReductionMode::Raw)
}
