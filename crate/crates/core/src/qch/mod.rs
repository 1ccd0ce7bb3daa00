//! Quantum causal histories: an acyclic graph, a quantum operation for
//! every related pair of events, and unitaries for complete pairs.
//!
//! Verification covers the Extension, Spacelike Commutativity and
//! Composition axioms on every future/past extension map the instance
//! supplies (synthesised from complete pairs or declared explicitly).

mod axioms;

pub use axioms::{
    check_composition, check_extension, check_spacelike_commutativity, verify_all, verify_complete_pair_reductions,
};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::causal::{AcausalSet, CausalGraph};
use crate::channel::{compose, embedding_map, restrict_output, KrausMap, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::Matrix;
use crate::report::{Check, Report};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// `xi <= zeta` with the unitary `U(xi, zeta): H(xi) -> H(zeta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletePair<T> {
    pub xi: AcausalSet,
    pub zeta: AcausalSet,
    pub unitary: Matrix<T>,
}

/// Explicit future extension `Phi_F(vertex, zeta): A(vertex) -> A(zeta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeclaredFuture<T> {
    pub vertex: String,
    pub zeta: AcausalSet,
    pub map: KrausMap<T>,
}

/// Explicit past extension `Phi_P(xi, vertex): A(xi) -> A(vertex)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeclaredPast<T> {
    pub xi: AcausalSet,
    pub vertex: String,
    pub map: KrausMap<T>,
}

/// `Phi(source, target)` for related events not joined by an edge.
#[derive(Clone, Debug, PartialEq)]
pub struct RelatedMap<T> {
    pub source: String,
    pub target: String,
    pub map: KrausMap<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Qch<T> {
    pub graph: CausalGraph,
    pub edge_maps: BTreeMap<String, KrausMap<T>>,
    pub complete_pairs: Vec<CompletePair<T>>,
    pub declared_futures: Vec<DeclaredFuture<T>>,
    pub declared_pasts: Vec<DeclaredPast<T>>,
    pub related_maps: Vec<RelatedMap<T>>,
}

/// Where an extension map came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Pair(usize),
    Declared(usize),
}

/// A future extension `Phi_F(vertex, set)` or past extension `Phi_P(set, vertex)`.
#[derive(Clone, Debug)]
pub struct ExtensionMap<T> {
    pub vertex: String,
    pub set: AcausalSet,
    pub map: KrausMap<T>,
    pub origin: Origin,
}

/// Future and past maps induced by one complete pair.
#[derive(Clone, Debug)]
pub struct PairMaps<T> {
    /// `Phi_F(x, zeta)(rho) = U iota_x(rho) U^dagger` for each `x` in `xi`.
    pub futures: Vec<(String, KrausMap<T>)>,
    /// `Phi_P(xi, y)(rho) = tr_{zeta \ y}(U rho U^dagger)` for each `y` in `zeta`.
    pub pasts: Vec<(String, KrausMap<T>)>,
}

/// Knobs shared by the verification suites.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub tol: Tolerances,
    /// Also enumerate every complete future and past (graphs up to 12 vertices).
    pub exhaustive: bool,
    pub parallel: bool,
}

pub(crate) fn run_tasks<I, O, F>(parallel: bool, items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

impl<T: Real> Qch<T> {
    /// Every edge needs a map and every map needs an edge.
    pub fn new(graph: CausalGraph, edge_maps: BTreeMap<String, KrausMap<T>>) -> Result<Self> {
        for id in edge_maps.keys() {
            graph.edge(id)?;
        }
        if let Some(e) = graph.edges().iter().find(|e| !edge_maps.contains_key(&e.id)) {
            return Err(Error::MissingEdge { from: e.source.clone(), to: e.target.clone() });
        }
        Ok(Self {
            graph,
            edge_maps,
            complete_pairs: Vec::new(),
            declared_futures: Vec::new(),
            declared_pasts: Vec::new(),
            related_maps: Vec::new(),
        })
    }

    pub fn with_pair<S: AsRef<str>, R: AsRef<str>>(mut self, xi: &[S], zeta: &[R], unitary: Matrix<T>) -> Result<Self> {
        let xi = AcausalSet::new(&self.graph, xi)?;
        let zeta = AcausalSet::new(&self.graph, zeta)?;
        self.complete_pairs.push(CompletePair { xi, zeta, unitary });
        Ok(self)
    }

    pub fn with_declared_future<S: AsRef<str>>(mut self, vertex: &str, zeta: &[S], map: KrausMap<T>) -> Result<Self> {
        self.graph.dim(vertex)?;
        let zeta = AcausalSet::new(&self.graph, zeta)?;
        self.declared_futures.push(DeclaredFuture { vertex: vertex.into(), zeta, map });
        Ok(self)
    }

    pub fn with_declared_past<S: AsRef<str>>(mut self, xi: &[S], vertex: &str, map: KrausMap<T>) -> Result<Self> {
        self.graph.dim(vertex)?;
        let xi = AcausalSet::new(&self.graph, xi)?;
        self.declared_pasts.push(DeclaredPast { xi, vertex: vertex.into(), map });
        Ok(self)
    }

    pub fn with_related_map(mut self, source: &str, target: &str, map: KrausMap<T>) -> Result<Self> {
        self.graph.dim(source)?;
        self.graph.dim(target)?;
        self.related_maps.push(RelatedMap { source: source.into(), target: target.into(), map });
        Ok(self)
    }

    /// `Phi(x, y)`: the edge map when an edge exists, else a declared related-pair map.
    pub fn relation_map(&self, x: &str, y: &str) -> Result<Option<&KrausMap<T>>> {
        if let Some(e) = self.graph.edge_between(x, y)? {
            return Ok(self.edge_maps.get(&e.id));
        }
        Ok(self.related_maps.iter().find(|r| r.source == x && r.target == y).map(|r| &r.map))
    }

    /// Like [`Self::relation_map`] but a missing map for `x < y` is an error.
    /// Unrelated pairs give `None`.
    pub(crate) fn required_map(&self, x: &str, y: &str) -> Result<Option<&KrausMap<T>>> {
        match self.relation_map(x, y)? {
            Some(m) => Ok(Some(m)),
            None if self.graph.precedes(x, y)? => {
                Err(Error::MissingEdge { from: x.to_string(), to: y.to_string() })
            }
            None => Ok(None),
        }
    }

    /// Future extensions from pairs first, then declared ones, in declaration order.
    pub fn future_maps(&self) -> Result<Vec<ExtensionMap<T>>> {
        let mut out = Vec::new();
        for (i, pair) in self.complete_pairs.iter().enumerate() {
            for (x, map) in synthesize_pair_maps(self, i)?.futures {
                out.push(ExtensionMap { vertex: x, set: pair.zeta.clone(), map, origin: Origin::Pair(i) });
            }
        }
        for (i, d) in self.declared_futures.iter().enumerate() {
            out.push(ExtensionMap {
                vertex: d.vertex.clone(),
                set: d.zeta.clone(),
                map: d.map.clone(),
                origin: Origin::Declared(i),
            });
        }
        Ok(out)
    }

    pub fn past_maps(&self) -> Result<Vec<ExtensionMap<T>>> {
        let mut out = Vec::new();
        for (i, pair) in self.complete_pairs.iter().enumerate() {
            for (y, map) in synthesize_pair_maps(self, i)?.pasts {
                out.push(ExtensionMap { vertex: y, set: pair.xi.clone(), map, origin: Origin::Pair(i) });
            }
        }
        for (i, d) in self.declared_pasts.iter().enumerate() {
            out.push(ExtensionMap {
                vertex: d.vertex.clone(),
                set: d.xi.clone(),
                map: d.map.clone(),
                origin: Origin::Declared(i),
            });
        }
        Ok(out)
    }
}

/// Future and past maps of pair `index`.
pub fn synthesize_pair_maps<T: Real>(q: &Qch<T>, index: usize) -> Result<PairMaps<T>> {
    let pair = q
        .complete_pairs
        .get(index)
        .ok_or_else(|| Error::Dim(format!("no complete pair with index {index}")))?;
    let xi = pair.xi.layout(&q.graph)?;
    let zeta = pair.zeta.layout(&q.graph)?;
    if pair.unitary.shape() != (zeta.total_dim(), xi.total_dim()) {
        return Err(Error::Dim(format!(
            "U{}{} must be {}x{}, got {}x{}",
            pair.xi.label(),
            pair.zeta.label(),
            zeta.total_dim(),
            xi.total_dim(),
            pair.unitary.rows(),
            pair.unitary.cols()
        )));
    }
    let residual = pair.unitary.unitarity_residual();
    if residual >= T::lit(crate::tolerance::EQ) {
        return Err(Error::NotUnitary(residual.as_f64()));
    }
    let conj = KrausMap::conjugation(pair.unitary.clone());
    let futures = pair
        .xi
        .members()
        .iter()
        .map(|x| Ok((x.clone(), compose(&conj, &embedding_map(x, &xi)?)?)))
        .collect::<Result<_>>()?;
    let pasts = pair
        .zeta
        .members()
        .iter()
        .map(|y| Ok((y.clone(), restrict_output(&conj, y, &zeta)?)))
        .collect::<Result<_>>()?;
    Ok(PairMaps { futures, pasts })
}

fn map_checks<T: Real>(name: &str, map: &KrausMap<T>, in_dim: usize, out_dim: usize, tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    let dims_ok = map.in_dim() == in_dim && map.out_dim() == out_dim;
    let mut dims = Check::flag(format!("{name}/dims"), dims_ok);
    if !dims_ok {
        dims = dims.with_detail(format!(
            "E_DOMAIN: map is {} -> {}, expected {in_dim} -> {out_dim}",
            map.in_dim(),
            map.out_dim()
        ));
    }
    checks.push(dims);
    let cp = map.choi().is_completely_positive(T::lit(tol.psd));
    checks.push(Check::flag(format!("{name}/cp"), cp));
    checks.push(Check::below(format!("{name}/tp"), map.trace_preservation_residual().as_f64(), tol.eq));
    checks
}

/// Domain/range condition, complete positivity and trace preservation of
/// every map, plus acausality, completeness and unitarity of every pair.
pub fn validate_qch<T: Real>(q: &Qch<T>, tol: &Tolerances) -> Result<Report> {
    q.graph.ensure_acyclic()?;
    let g = &q.graph;
    let mut report = Report::new();
    for e in g.edges() {
        let map = q.edge_maps.get(&e.id).ok_or_else(|| Error::MissingEdge { from: e.source.clone(), to: e.target.clone() })?;
        report.checks.extend(map_checks(&format!("edge[{}]", e.id), map, g.dim(&e.source)?, g.dim(&e.target)?, tol));
    }
    for r in &q.related_maps {
        let name = format!("related[{}->{}]", r.source, r.target);
        report.push(Check::flag(format!("{name}/related"), g.precedes(&r.source, &r.target)?));
        report.checks.extend(map_checks(&name, &r.map, g.dim(&r.source)?, g.dim(&r.target)?, tol));
    }
    for (i, p) in q.complete_pairs.iter().enumerate() {
        let name = format!("pair[{i}]");
        report.push(Check::flag(format!("{name}/acausal"), g.is_acausal(p.xi.members())? && g.is_acausal(p.zeta.members())?));
        report.push(Check::flag(format!("{name}/complete"), g.is_complete_pair(p.xi.members(), p.zeta.members())?));
        let (dxi, dzeta) = (p.xi.layout(g)?.total_dim(), p.zeta.layout(g)?.total_dim());
        let shape_ok = p.unitary.shape() == (dzeta, dxi);
        report.push(Check::flag(format!("{name}/dims"), shape_ok));
        let residual = if shape_ok { p.unitary.unitarity_residual().as_f64() } else { f64::MAX };
        report.push(Check::below(format!("{name}/unitary"), residual, tol.eq));
    }
    for (i, d) in q.declared_futures.iter().enumerate() {
        let name = format!("declared_future[{i}]");
        report.push(Check::flag(format!("{name}/complete"), g.is_complete_future(d.zeta.members(), &d.vertex)?));
        let dims_ok = d.map.in_dim() == g.dim(&d.vertex)? && d.map.out_dim() == d.zeta.layout(g)?.total_dim();
        report.push(Check::flag(format!("{name}/dims"), dims_ok));
    }
    for (i, d) in q.declared_pasts.iter().enumerate() {
        let name = format!("declared_past[{i}]");
        report.push(Check::flag(format!("{name}/complete"), g.is_complete_past(d.xi.members(), &d.vertex)?));
        let dims_ok = d.map.out_dim() == g.dim(&d.vertex)? && d.map.in_dim() == d.xi.layout(g)?.total_dim();
        report.push(Check::flag(format!("{name}/dims"), dims_ok));
    }
    Ok(report)
}
