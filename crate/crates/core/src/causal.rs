//! Directed graphs with per-vertex dimensions and their causal order.
//!
//! `x` precedes `y` when a directed path of length at least one runs from `x`
//! to `y`. Completeness of futures and pasts is decided by walking every
//! maximal (inextendible) path, which is exponential in the worst case and
//! therefore capped at [`PATH_CAP`] explored path prefixes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::channel::TensorLayout;
use crate::error::{Error, Result};

/// Upper bound on path prefixes explored by a single completeness query.
pub const PATH_CAP: usize = 1_000_000;
/// Largest graph for which every acausal set is enumerated.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Precedes,
    Succeeds,
    Spacelike,
    Equal,
}

/// Unvalidated graph as it appears in files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// `E = (E0, E1, r, s)` with a finite dimension attached to each vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct CausalGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    edge_between: BTreeMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    // reach[x][y]: path of length >= 1 from x to y
    reach: Vec<Vec<bool>>,
}

impl TryFrom<GraphSpec> for CausalGraph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        CausalGraph::new(spec.vertices, spec.edges)
    }
}

impl From<CausalGraph> for GraphSpec {
    fn from(g: CausalGraph) -> Self {
        GraphSpec { vertices: g.vertices, edges: g.edges }
    }
}

impl PartialEq for CausalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl CausalGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let mut vertex_index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.dim == 0 {
                return Err(Error::Graph(format!("vertex `{}` has dimension 0", v.id)));
            }
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(Error::Graph(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        let n = vertices.len();
        let mut edge_index = BTreeMap::new();
        let mut edge_between = BTreeMap::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            let s = *vertex_index.get(&e.source).ok_or_else(|| Error::Vertex(e.source.clone()))?;
            let t = *vertex_index.get(&e.target).ok_or_else(|| Error::Vertex(e.target.clone()))?;
            if edge_index.insert(e.id.clone(), k).is_some() {
                return Err(Error::Graph(format!("duplicate edge id `{}`", e.id)));
            }
            if edge_between.insert((s, t), k).is_some() {
                return Err(Error::Graph(format!("more than one edge from `{}` to `{}`", e.source, e.target)));
            }
            out_adj[s].push(t);
            in_adj[t].push(s);
        }
        let reach = (0..n)
            .map(|x| {
                let mut seen = vec![false; n];
                let mut queue: VecDeque<usize> = out_adj[x].iter().copied().collect();
                while let Some(v) = queue.pop_front() {
                    if !std::mem::replace(&mut seen[v], true) {
                        queue.extend(out_adj[v].iter().copied());
                    }
                }
                seen
            })
            .collect();
        Ok(Self { vertices, edges, vertex_index, edge_index, edge_between, out_adj, in_adj, reach })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn idx(&self, id: &str) -> Result<usize> {
        self.vertex_index.get(id).copied().ok_or_else(|| Error::Vertex(id.to_string()))
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertex_index.contains_key(id)
    }

    pub fn dim(&self, id: &str) -> Result<usize> {
        Ok(self.vertices[self.idx(id)?].dim)
    }

    /// `sum_x dim(x)`: size of the direct sum of all vertex spaces.
    pub fn total_dim(&self) -> usize {
        self.vertices.iter().map(|v| v.dim).sum()
    }

    /// Offset of each vertex's coordinate block in the direct sum, in vertex order.
    pub fn block_offset(&self, id: &str) -> Result<usize> {
        let i = self.idx(id)?;
        Ok(self.vertices[..i].iter().map(|v| v.dim).sum())
    }

    pub fn edge(&self, id: &str) -> Result<&Edge> {
        self.edge_index.get(id).map(|&k| &self.edges[k]).ok_or_else(|| Error::Edge(id.to_string()))
    }

    pub fn edge_between(&self, source: &str, target: &str) -> Result<Option<&Edge>> {
        let key = (self.idx(source)?, self.idx(target)?);
        Ok(self.edge_between.get(&key).map(|&k| &self.edges[k]))
    }

    /// Same vertices, every edge reversed.
    pub fn reversed(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), source: e.target.clone(), target: e.source.clone() })
            .collect();
        Self::new(self.vertices.clone(), edges).expect("reversal preserves validity")
    }

    pub fn precedes(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.reach[self.idx(x)?][self.idx(y)?])
    }

    /// `x <= y`: equal or connected by a directed path.
    pub fn leq(&self, x: &str, y: &str) -> Result<bool> {
        Ok(x == y && self.has_vertex(x) || self.precedes(x, y)?)
    }

    pub fn causal_relation(&self, x: &str, y: &str) -> Result<Relation> {
        let (i, j) = (self.idx(x)?, self.idx(y)?);
        Ok(if self.reach[i][j] {
            Relation::Precedes
        } else if self.reach[j][i] {
            Relation::Succeeds
        } else if i == j {
            Relation::Equal
        } else {
            Relation::Spacelike
        })
    }

    fn spacelike_idx(&self, i: usize, j: usize) -> bool {
        i != j && !self.reach[i][j] && !self.reach[j][i]
    }

    fn indices<S: AsRef<str>>(&self, set: &[S]) -> Result<Vec<usize>> {
        if set.is_empty() {
            return Err(Error::Graph("vertex set must be non-empty".into()));
        }
        let mut idx: Vec<usize> = set.iter().map(|s| self.idx(s.as_ref())).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Every pair of distinct members is spacelike separated.
    pub fn is_acausal<S: AsRef<str>>(&self, set: &[S]) -> Result<bool> {
        let idx = self.indices(set)?;
        Ok(idx.iter().enumerate().all(|(a, &i)| idx[a + 1..].iter().all(|&j| self.spacelike_idx(i, j))))
    }

    fn acausal_mask<S: AsRef<str>>(&self, set: &[S]) -> Result<Vec<bool>> {
        self.ensure_acyclic()?;
        if !self.is_acausal(set)? {
            return Err(Error::NotAcausal(set.iter().map(|s| s.as_ref().to_string()).collect()));
        }
        let mut mask = vec![false; self.vertices.len()];
        for i in self.indices(set)? {
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Every future-inextendible path leaving `x` meets `set` after its first vertex.
    pub fn is_complete_future<S: AsRef<str>>(&self, set: &[S], x: &str) -> Result<bool> {
        let mask = self.acausal_mask(set)?;
        self.covers(&mask, self.idx(x)?, &self.out_adj)
    }

    /// Mirror of [`Self::is_complete_future`] along reversed edges.
    pub fn is_complete_past<S: AsRef<str>>(&self, set: &[S], x: &str) -> Result<bool> {
        let mask = self.acausal_mask(set)?;
        self.covers(&mask, self.idx(x)?, &self.in_adj)
    }

    fn covers(&self, mask: &[bool], start: usize, next: &[Vec<usize>]) -> Result<bool> {
        // the only maximal path from a terminal vertex is the vertex itself
        if next[start].is_empty() {
            return Ok(false);
        }
        let mut stack: Vec<usize> = next[start].clone();
        let mut explored = 0usize;
        while let Some(v) = stack.pop() {
            explored += 1;
            if explored > PATH_CAP {
                return Err(Error::TooLarge(format!("more than {PATH_CAP} path prefixes")));
            }
            if mask[v] {
                continue;
            }
            if next[v].is_empty() {
                return Ok(false);
            }
            stack.extend_from_slice(&next[v]);
        }
        Ok(true)
    }

    /// `xi` is a complete past of every member of `zeta` and `zeta` a complete future of every member of `xi`.
    pub fn is_complete_pair<S: AsRef<str>, R: AsRef<str>>(&self, xi: &[S], zeta: &[R]) -> Result<bool> {
        let past = self.acausal_mask(xi)?;
        let future = self.acausal_mask(zeta)?;
        for x in self.indices(xi)? {
            if !self.covers(&future, x, &self.out_adj)? {
                return Ok(false);
            }
        }
        for y in self.indices(zeta)? {
            if !self.covers(&past, y, &self.in_adj)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `{z : x <= z <= y}`, empty unless `x <= y`.
    pub fn interval(&self, x: &str, y: &str) -> Result<BTreeSet<String>> {
        let (i, j) = (self.idx(x)?, self.idx(y)?);
        let leq = |a: usize, b: usize| a == b || self.reach[a][b];
        if !leq(i, j) {
            return Ok(BTreeSet::new());
        }
        Ok((0..self.vertices.len())
            .filter(|&z| leq(i, z) && leq(z, j))
            .map(|z| self.vertices[z].id.clone())
            .collect())
    }

    pub fn is_acyclic(&self) -> bool {
        (0..self.vertices.len()).all(|i| !self.reach[i][i])
    }

    pub fn ensure_acyclic(&self) -> Result<()> {
        if self.is_acyclic() {
            Ok(())
        } else {
            Err(Error::Ctc(self.detect_ctc()))
        }
    }

    /// All elementary directed cycles, each listed from its first vertex in vertex order.
    pub fn detect_ctc(&self) -> Vec<Vec<String>> {
        let n = self.vertices.len();
        let mut cycles = Vec::new();
        for s in 0..n {
            if !self.reach[s][s] {
                continue;
            }
            let mut path = vec![s];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            self.cycles_from(s, s, &mut path, &mut on_path, &mut cycles);
        }
        cycles
            .into_iter()
            .map(|c: Vec<usize>| c.into_iter().map(|i| self.vertices[i].id.clone()).collect())
            .collect()
    }

    fn cycles_from(&self, s: usize, v: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
        for &w in &self.out_adj[v] {
            if w == s {
                out.push(path.clone());
            } else if w > s && !on_path[w] && self.reach[w][s] {
                on_path[w] = true;
                path.push(w);
                self.cycles_from(s, w, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }

    /// Every acausal set, members in ascending id order, sets in ascending bitmask order.
    pub fn acausal_sets(&self) -> Result<Vec<AcausalSet>> {
        let n = self.vertices.len();
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!(
                "acausal set enumeration is limited to {ENUMERATION_LIMIT} vertices, graph has {n}"
            )));
        }
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << n) {
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let ok = idx.iter().enumerate().all(|(a, &i)| idx[a + 1..].iter().all(|&j| self.spacelike_idx(i, j)));
            if ok {
                out.push(AcausalSet { members: idx.iter().map(|&i| self.vertices[i].id.clone()).collect::<BTreeSet<_>>().into_iter().collect() });
            }
        }
        Ok(out)
    }
}

/// Non-empty set of pairwise spacelike vertices, kept in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AcausalSet {
    members: Vec<String>,
}

impl AcausalSet {
    pub fn new<S: AsRef<str>>(graph: &CausalGraph, members: &[S]) -> Result<Self> {
        if !graph.is_acausal(members)? {
            return Err(Error::NotAcausal(members.iter().map(|s| s.as_ref().to_string()).collect()));
        }
        let set: BTreeSet<String> = members.iter().map(|s| s.as_ref().to_string()).collect();
        Ok(Self { members: set.into_iter().collect() })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.binary_search_by(|m| m.as_str().cmp(id)).is_ok()
    }

    /// Tensor factor layout of `H(xi)`, factors in ascending id order.
    pub fn layout(&self, graph: &CausalGraph) -> Result<TensorLayout> {
        let dims = self.members.iter().map(|m| graph.dim(m)).collect::<Result<Vec<_>>>()?;
        TensorLayout::new(self.members.clone(), dims)
    }

    /// `{a,b}` style label for reports.
    pub fn label(&self) -> String {
        format!("{{{}}}", self.members.join(","))
    }
}
