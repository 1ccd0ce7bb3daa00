//! JSON file formats and deterministic report output.
//!
//! Matrices are `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order; channels are `{"in_dim": n, "out_dim": m, "kraus": [matrix, ...]}`.
//! Loader functions keep the library error codes of semantic failures and
//! report malformed JSON as `E_PARSE` with line and column.

use std::collections::BTreeMap;
use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::algebra::{Algebra, CkFamily};
use crate::causal::{CausalGraph, GraphSpec};
use crate::channel::{KrausMap, LinearMap};
use crate::error::{Error, Result};
use crate::matkernel::Matrix;
use crate::qch::Qch;
use crate::scalar::{Real, C};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl<T: Real> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            data: self.data().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let data = r.data.iter().map(|[re, im]| C::new(T::lit(*re), T::lit(*im))).collect();
        Matrix::new(r.rows, r.cols, data).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct ChannelRepr<T: Real> {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Matrix<T>>,
}

impl<T: Real> Serialize for KrausMap<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelRepr { in_dim: self.in_dim(), out_dim: self.out_dim(), kraus: self.kraus().to_vec() }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for KrausMap<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ChannelRepr::<T>::deserialize(d)?;
        // keep the family exactly as written, zero operators included
        KrausMap::from_parts_unchecked(r.in_dim, r.out_dim, r.kraus).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PairRepr<T: Real> {
    pub xi: Vec<String>,
    pub zeta: Vec<String>,
    pub unitary: Matrix<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FutureRepr<T: Real> {
    pub vertex: String,
    pub zeta: Vec<String>,
    pub channel: KrausMap<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PastRepr<T: Real> {
    pub xi: Vec<String>,
    pub vertex: String,
    pub channel: KrausMap<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RelatedRepr<T: Real> {
    pub source: String,
    pub target: String,
    pub channel: KrausMap<T>,
}

/// QCH file layout. Only `graph` and `edge_maps` are required.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct QchFile<T: Real> {
    pub graph: GraphSpec,
    pub edge_maps: BTreeMap<String, KrausMap<T>>,
    #[serde(default)]
    pub complete_pairs: Vec<PairRepr<T>>,
    #[serde(default)]
    pub declared_futures: Vec<FutureRepr<T>>,
    #[serde(default)]
    pub declared_pasts: Vec<PastRepr<T>>,
    #[serde(default)]
    pub related_maps: Vec<RelatedRepr<T>>,
}

impl<T: Real> QchFile<T> {
    pub fn into_qch(self) -> Result<Qch<T>> {
        let graph = CausalGraph::new(self.graph.vertices, self.graph.edges)?;
        let mut q = Qch::new(graph, self.edge_maps)?;
        for p in self.complete_pairs {
            q = q.with_pair(&p.xi, &p.zeta, p.unitary)?;
        }
        for f in self.declared_futures {
            q = q.with_declared_future(&f.vertex, &f.zeta, f.channel)?;
        }
        for p in self.declared_pasts {
            q = q.with_declared_past(&p.xi, &p.vertex, p.channel)?;
        }
        for r in self.related_maps {
            q = q.with_related_map(&r.source, &r.target, r.channel)?;
        }
        Ok(q)
    }

    pub fn from_qch(q: &Qch<T>) -> Self {
        QchFile {
            graph: GraphSpec { vertices: q.graph.vertices().to_vec(), edges: q.graph.edges().to_vec() },
            edge_maps: q.edge_maps.clone(),
            complete_pairs: q
                .complete_pairs
                .iter()
                .map(|p| PairRepr {
                    xi: p.xi.members().to_vec(),
                    zeta: p.zeta.members().to_vec(),
                    unitary: p.unitary.clone(),
                })
                .collect(),
            declared_futures: q
                .declared_futures
                .iter()
                .map(|f| FutureRepr { vertex: f.vertex.clone(), zeta: f.zeta.members().to_vec(), channel: f.map.clone() })
                .collect(),
            declared_pasts: q
                .declared_pasts
                .iter()
                .map(|p| PastRepr { xi: p.xi.members().to_vec(), vertex: p.vertex.clone(), channel: p.map.clone() })
                .collect(),
            related_maps: q
                .related_maps
                .iter()
                .map(|r| RelatedRepr { source: r.source.clone(), target: r.target.clone(), channel: r.map.clone() })
                .collect(),
        }
    }
}

/// CK family file layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CkFile<T: Real> {
    pub graph: GraphSpec,
    pub projections: BTreeMap<String, Matrix<T>>,
    pub isometries: BTreeMap<String, Matrix<T>>,
}

impl<T: Real> CkFile<T> {
    pub fn into_family(self) -> Result<CkFamily<T>> {
        let graph = CausalGraph::new(self.graph.vertices, self.graph.edges)?;
        CkFamily::new(graph, self.projections, self.isometries)
    }

    pub fn from_family(f: &CkFamily<T>) -> Self {
        CkFile {
            graph: GraphSpec { vertices: f.graph.vertices().to_vec(), edges: f.graph.edges().to_vec() },
            projections: f.projections.clone(),
            isometries: f.isometries.clone(),
        }
    }
}

/// `{"dim", "blocks", "iterations"}` summary of a generated algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<[usize; 2]>>,
    pub iterations: usize,
}

impl AlgebraSummary {
    pub fn new<T: Real>(alg: &Algebra<T>, blocks: Option<&[(usize, usize)]>) -> Self {
        AlgebraSummary {
            dim: alg.dim(),
            blocks: blocks.map(|b| b.iter().map(|&(n, m)| [n, m]).collect()),
            iterations: alg.iterations,
        }
    }
}

/// Deserializes `text`, reporting syntax and shape errors as `E_PARSE`.
pub fn parse_json<V: DeserializeOwned>(text: &str) -> Result<V> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_qch<T: Real>(text: &str) -> Result<Qch<T>> {
    parse_json::<QchFile<T>>(text)?.into_qch()
}

pub fn load_ck_family<T: Real>(text: &str) -> Result<CkFamily<T>> {
    parse_json::<CkFile<T>>(text)?.into_family()
}

/// Pretty printing with every float written as `{:.16e}` (17 significant digits).
pub struct FixedDigits {
    inner: PrettyFormatter<'static>,
}

impl Default for FixedDigits {
    fn default() -> Self {
        FixedDigits { inner: PrettyFormatter::with_indent(b"  ") }
    }
}

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Canonical text: object keys sorted, floats at 17 significant digits, trailing newline.
pub fn to_canonical_json<V: Serialize>(value: &V) -> Result<String> {
    // going through Value sorts every object's keys
    let value = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::default());
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::<f64>::from_complex(&[&[(1.0, 0.5), (0.0, -2.0)], &[(0.1, 0.0), (3.0, 0.0)]]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":2,"data":[[1.0,0.5],[0.0,-2.0],[0.1,0.0],[3.0,0.0]]}"#);
        let back: Matrix<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix<f64>>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
    }

    #[test]
    fn channel_keeps_zero_operators() {
        let text = r#"{"in_dim":1,"out_dim":1,"kraus":[{"rows":1,"cols":1,"data":[[1,0]]},{"rows":1,"cols":1,"data":[[0,0]]}]}"#;
        let k: KrausMap<f64> = serde_json::from_str(text).unwrap();
        assert_eq!(k.kraus().len(), 2);
    }

    #[test]
    fn canonical_json_sorts_and_fixes_digits() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: Vec<f64>,
        }
        let text = to_canonical_json(&S { zeta: 0.1, alpha: vec![1.0, -2.5e-12] }).unwrap();
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("-2.4999999999999998e-12"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["zeta"].as_f64(), Some(0.1));
    }

    #[test]
    fn qch_errors_keep_codes() {
        let missing = r#"{"graph":{"vertices":[{"id":"a","dim":1},{"id":"b","dim":1}],
            "edges":[{"id":"e","source":"a","target":"b"}]},"edge_maps":{}}"#;
        assert_eq!(load_qch::<f64>(missing).unwrap_err().code(), "E_MISSING_EDGE");
        let err = load_qch::<f64>("{\"graph\": [").unwrap_err();
        assert_eq!(err.code(), "E_PARSE");
        assert!(err.to_string().contains("line"));
    }
}
