//! Gate-model circuits as quantum causal histories.
//!
//! Qubit `q` at layer boundary `t` becomes vertex `q{q}_t{t}` (zero padded so
//! that lexicographic and numeric order agree) carrying `C^2`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::causal::{CausalGraph, Edge, Vertex};
use crate::channel::{reduce_map, KrausMap, ReductionMode, TensorLayout};
use crate::error::{Error, Result};
use crate::matkernel::Matrix;
use crate::qch::Qch;
use crate::scalar::{c, Real};
use crate::tolerance::EQ;

/// One gate as written in a circuit file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec<T: Real> {
    pub gate: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", bound = "T: Real")]
    pub matrix: Option<Matrix<T>>,
}

/// Circuit file contents before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CircuitFile<T: Real> {
    pub qubits: usize,
    pub layers: Vec<Vec<GateSpec<T>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub custom: BTreeMap<String, Matrix<T>>,
}

/// A validated gate with its resolved unitary (first target = first tensor factor).
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T> {
    pub name: String,
    pub targets: Vec<usize>,
    pub unitary: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    pub num_qubits: usize,
    pub layers: Vec<Vec<Gate<T>>>,
}

/// Unitary of a built-in gate, `None` for unknown names.
pub fn builtin_gate<T: Real>(name: &str) -> Option<Matrix<T>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = |rows: &[&[(f64, f64)]]| Matrix::from_complex(rows);
    let (o, z, i) = ((1.0, 0.0), (0.0, 0.0), (0.0, 1.0));
    Some(match name {
        "I" => Matrix::identity(2),
        "X" => m(&[&[z, o], &[o, z]]),
        "Y" => m(&[&[z, (0.0, -1.0)], &[i, z]]),
        "Z" => Matrix::diag_real(&[1.0, -1.0]),
        "H" => Matrix::from_real(&[&[s, s], &[s, -s]]),
        "S" => m(&[&[o, z], &[z, i]]),
        "T" => m(&[&[o, z], &[z, (s, s)]]),
        "CNOT" => Matrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
        "CZ" => Matrix::diag_real(&[1.0, 1.0, 1.0, -1.0]),
        "SWAP" => Matrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        _ => return None,
    })
}

fn arity_of<T: Real>(u: &Matrix<T>, name: &str) -> Result<usize> {
    match u.shape() {
        (2, 2) => Ok(1),
        (4, 4) => Ok(2),
        (r, c) => Err(Error::Arity(format!("gate {name} has a {r}x{c} matrix; only 1- and 2-qubit gates are supported"))),
    }
}

fn check_unitary<T: Real>(u: &Matrix<T>, name: &str) -> Result<()> {
    let r = u.unitarity_residual().as_f64();
    if r >= EQ {
        return Err(Error::Gate(format!("{name}: matrix is not unitary (residual {r:e})")));
    }
    Ok(())
}

impl<T: Real> Circuit<T> {
    pub fn from_file(file: CircuitFile<T>) -> Result<Self> {
        let n = file.qubits;
        if n == 0 {
            return Err(Error::Parse("a circuit needs at least one qubit".into()));
        }
        for (name, u) in &file.custom {
            if builtin_gate::<T>(name).is_some() {
                return Err(Error::Gate(format!("custom gate {name} shadows a built-in gate")));
            }
            arity_of(u, name)?;
            check_unitary(u, name)?;
        }
        let mut layers = Vec::with_capacity(file.layers.len());
        for (t, layer) in file.layers.into_iter().enumerate() {
            let mut used = vec![false; n];
            let mut gates = Vec::with_capacity(layer.len());
            for g in layer {
                let unitary = match (&g.matrix, file.custom.get(&g.gate), builtin_gate::<T>(&g.gate)) {
                    (Some(m), _, _) => {
                        check_unitary(m, &g.gate)?;
                        m.clone()
                    }
                    (None, Some(m), _) => m.clone(),
                    (None, None, Some(m)) => m,
                    (None, None, None) => return Err(Error::Gate(g.gate.clone())),
                };
                let arity = arity_of(&unitary, &g.gate)?;
                if g.targets.len() != arity {
                    return Err(Error::Arity(format!(
                        "gate {} in layer {t} acts on {arity} qubit(s) but has {} target(s)",
                        g.gate,
                        g.targets.len()
                    )));
                }
                for (k, &q) in g.targets.iter().enumerate() {
                    if q >= n {
                        return Err(Error::Target(format!("gate {} in layer {t} targets qubit {q} of {n}", g.gate)));
                    }
                    if g.targets[..k].contains(&q) {
                        return Err(Error::Overlap(format!("gate {} in layer {t} repeats qubit {q}", g.gate)));
                    }
                    if used[q] {
                        return Err(Error::Overlap(format!("qubit {q} is used twice in layer {t}")));
                    }
                    used[q] = true;
                }
                gates.push(Gate { name: g.gate, targets: g.targets, unitary });
            }
            layers.push(gates);
        }
        Ok(Self { num_qubits: n, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Vertex id of qubit `q` at boundary `t`.
    pub fn vertex_id(&self, q: usize, t: usize) -> String {
        let wq = (self.num_qubits.max(1) - 1).to_string().len();
        let wt = self.depth().to_string().len();
        format!("q{q:0wq$}_t{t:0wt$}")
    }

    /// Unitary of layer `t` on the whole register, qubit 0 as the first factor.
    pub fn layer_unitary(&self, t: usize) -> Matrix<T> {
        let n = self.num_qubits;
        self.layers[t].iter().fold(Matrix::identity(1 << n), |acc, g| &lift_gate(n, &g.targets, &g.unitary) * &acc)
    }
}

pub fn parse_circuit<T: Real>(text: &str) -> Result<Circuit<T>> {
    let file: CircuitFile<T> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Circuit::from_file(file)
}

/// `u` acting on qubits `targets` of an `n`-qubit register (big-endian: qubit 0 is the leading factor).
pub fn lift_gate<T: Real>(n: usize, targets: &[usize], u: &Matrix<T>) -> Matrix<T> {
    let dim = 1usize << n;
    let k = targets.len();
    let bit = |state: usize, q: usize| (state >> (n - 1 - q)) & 1;
    let local = |state: usize| targets.iter().fold(0, |acc, &q| (acc << 1) | bit(state, q));
    let mask: usize = targets.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    Matrix::from_fn(dim, dim, |r, col| {
        if r & !mask != col & !mask {
            return c(0.0, 0.0);
        }
        debug_assert!(local(r) < 1 << k);
        u[(local(r), local(col))]
    })
}

/// Graph, edge maps, one complete pair per gate (idle wires included), and
/// `Phi(x, y)` for related events two or more layers apart.
///
/// A two-qubit gate on `(a, b)` at layer `t` contributes the four edges
/// `(a|b, t) -> (a|b, t + 1)`, each carrying the channel-mode reduction of
/// the gate unitary. Maps between events further apart are channel-mode
/// reductions of the full register unitary over the intervening layers.
pub fn circuit_to_qch<T: Real>(circ: &Circuit<T>) -> Result<Qch<T>> {
    let n = circ.num_qubits;
    let depth = circ.depth();
    let id = |q: usize, t: usize| circ.vertex_id(q, t);
    let mut vertices = Vec::new();
    for t in 0..=depth {
        for q in 0..n {
            vertices.push(Vertex { id: id(q, t), dim: 2 });
        }
    }

    struct Block<T> {
        qubits: Vec<usize>,
        /// In ascending qubit order.
        unitary: Matrix<T>,
    }
    let mut blocks: Vec<Vec<Block<T>>> = Vec::with_capacity(depth);
    for layer in &circ.layers {
        let mut busy = vec![false; n];
        let mut row = Vec::new();
        for g in layer {
            let mut qubits = g.targets.clone();
            qubits.sort_unstable();
            let local: Vec<usize> = g.targets.iter().map(|q| qubits.binary_search(q).unwrap()).collect();
            let unitary = lift_gate(qubits.len(), &local, &g.unitary);
            for &q in &qubits {
                busy[q] = true;
            }
            row.push(Block { qubits, unitary });
        }
        for q in (0..n).filter(|&q| !busy[q]) {
            row.push(Block { qubits: vec![q], unitary: Matrix::identity(2) });
        }
        row.sort_by(|a, b| a.qubits.cmp(&b.qubits));
        blocks.push(row);
    }

    let mut edges = Vec::new();
    let mut maps = BTreeMap::new();
    let mut pairs = Vec::new();
    for (t, row) in blocks.iter().enumerate() {
        for b in row {
            let xi: Vec<String> = b.qubits.iter().map(|&q| id(q, t)).collect();
            let zeta: Vec<String> = b.qubits.iter().map(|&q| id(q, t + 1)).collect();
            let conj = KrausMap::conjugation(b.unitary.clone());
            let xi_layout = TensorLayout::new(xi.clone(), vec![2; xi.len()])?;
            let zeta_layout = TensorLayout::new(zeta.clone(), vec![2; zeta.len()])?;
            for x in &xi {
                for y in &zeta {
                    let edge_id = format!("{x}->{y}");
                    let map = if xi.len() == 1 {
                        conj.clone()
                    } else {
                        reduce_map(&conj, x, &xi_layout, y, &zeta_layout, ReductionMode::Channel)?
                    };
                    edges.push(Edge { id: edge_id.clone(), source: x.clone(), target: y.clone() });
                    maps.insert(edge_id, map);
                }
            }
            pairs.push((xi, zeta, b.unitary.clone()));
        }
    }

    let graph = CausalGraph::new(vertices, edges)?;
    let mut q = Qch::new(graph, maps)?;
    for (xi, zeta, u) in pairs {
        let xi: Vec<&str> = xi.iter().map(String::as_str).collect();
        let zeta: Vec<&str> = zeta.iter().map(String::as_str).collect();
        q = q.with_pair(&xi, &zeta, u)?;
    }

    let layouts: Vec<TensorLayout> = (0..=depth)
        .map(|t| TensorLayout::new((0..n).map(|q| id(q, t)).collect(), vec![2; n]))
        .collect::<Result<_>>()?;
    let layer_unitaries: Vec<Matrix<T>> = (0..depth).map(|t| circ.layer_unitary(t)).collect();
    for s in 0..depth {
        let mut w = layer_unitaries[s].clone();
        for u in s + 2..=depth {
            w = &layer_unitaries[u - 1] * &w;
            let conj = KrausMap::conjugation(w.clone());
            for a in 0..n {
                for b in 0..n {
                    let (x, y) = (id(a, s), id(b, u));
                    if q.graph.precedes(&x, &y)? {
                        let map = reduce_map(&conj, &x, &layouts[s], &y, &layouts[u], ReductionMode::Channel)?;
                        q = q.with_related_map(&x, &y, map)?;
                    }
                }
            }
        }
    }
    Ok(q)
}
