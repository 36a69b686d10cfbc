use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate edge name `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{0}` is empty")]
    EmptyEdge(String),
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("query contains no variables")]
    NoVariables,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("malformed decomposition: {0}")]
    MalformedDecomposition(String),
    #[error("instance exceeds oracle size guard: {0}")]
    SizeGuard(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear program infeasible: vertex `{0}` lies in no support edge")]
    Infeasible(String),
    #[error("subedge generation exceeded the cap of {0}")]
    SubedgeCap(usize),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
