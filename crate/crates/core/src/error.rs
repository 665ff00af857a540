use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown curve `{0}`")]
    UnknownCurve(String),

    #[error("graph is not a tree: {0}")]
    NotATree(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("graph is a chain; it has no maximal twigs")]
    IsChain,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular system")]
    Singular,

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("divisor is not snc-minimal: (-1)-curve `{0}` has branching number <= 2")]
    NotMinimal(String),

    #[error("invalid blow-up center: {0}")]
    InvalidCenter(String),

    #[error("cannot contract `{vertex}`: {reason}")]
    Contraction { vertex: String, reason: String },

    #[error("not a fiber: {0}")]
    NotAFiber(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("excess intersection: {0}")]
    ExcessIntersection(String),

    #[error("boundary is not snc: {0}")]
    NonSnc(String),

    #[error("not a join of two subtrees along one edge: {0}")]
    InvalidJoin(String),

    #[error("not a fiber class: {0}")]
    NotFiberClass(String),

    #[error("under-constrained class search; free directions: {0}")]
    Underconstrained(String),

    #[error("class search exceeded {0} candidates")]
    SearchLimit(usize),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
