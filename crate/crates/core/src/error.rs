use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the library. Every variant has a stable short code, see [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("unknown vertex `{0}`")]
    Vertex(String),
    #[error("unknown edge `{0}`")]
    Edge(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("graph contains closed timelike curves: {0:?}")]
    Ctc(Vec<Vec<String>>),
    #[error("vertex set {0:?} is not acausal")]
    NotAcausal(Vec<String>),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("map is not completely positive (Choi eigenvalue {0:e})")]
    NotCp(f64),
    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("no map supplied for related pair {from} -> {to}")]
    MissingEdge { from: String, to: String },
    #[error("edge `{edge}` violates domain/range condition: {detail}")]
    Domain { edge: String, detail: String },
    #[error("Cuntz-Krieger relations fail: {0}")]
    CkFail(String),
    #[error("degenerate decomposition: {0}")]
    Degenerate(String),
    #[error("unknown gate `{0}`")]
    Gate(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("overlapping targets: {0}")]
    Overlap(String),
    #[error("qubit index out of range: {0}")]
    Target(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dim(_) => "E_DIM",
            Error::NotHermitian(_) => "E_NOT_HERMITIAN",
            Error::Vertex(_) => "E_VERTEX",
            Error::Edge(_) => "E_EDGE",
            Error::Graph(_) => "E_GRAPH",
            Error::Ctc(_) => "E_CTC",
            Error::NotAcausal(_) => "E_NOT_ACAUSAL",
            Error::TooLarge(_) => "E_TOO_LARGE",
            Error::NotCp(_) => "E_NOT_CP",
            Error::NotUnitary(_) => "E_NOT_UNITARY",
            Error::MissingEdge { .. } => "E_MISSING_EDGE",
            Error::Domain { .. } => "E_DOMAIN",
            Error::CkFail(_) => "E_CK_FAIL",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Gate(_) => "E_GATE",
            Error::Arity(_) => "E_ARITY",
            Error::Overlap(_) => "E_OVERLAP",
            Error::Target(_) => "E_TARGET",
            Error::Parse(_) => "E_PARSE",
        }
    }
}
