use thiserror::Error;

/// Errors raised by graph, identification, density and oracle operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid node name {0:?}")]
    InvalidNodeName(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node {0} declared twice")]
    DuplicateNode(String),
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("edge between {0} and {1} already present")]
    DuplicateEdge(String, String),
    #[error("semi-directed cycle: {}", .0.join(" ~ "))]
    SemiDirectedCycle(Vec<String>),
    #[error("node set {0:?} is not contained in a single chain component")]
    StraddlesComponents(Vec<String>),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("not a strictly acyclic MPDAG: {0}")]
    NotSaMpdag(String),
    #[error("background knowledge conflicts with graph: {0}")]
    BackgroundConflict(String),
    #[error("orientation closure is contradictory: {0}")]
    OrientationConflict(String),
    #[error("graph is not a DAG: {0}")]
    NotADag(String),
    #[error("extension enumeration exceeded cap of {0} DAGs")]
    ExtensionCap(usize),
    #[error("node sets differ: {0}")]
    NodeSetMismatch(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("effect not identifiable in graph {graph}: proper semi-directed path {}", .path.join(" ~ "))]
    NotIdentifiable { graph: usize, path: Vec<String> },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown state {state:?} for variable {variable}")]
    UnknownState { variable: String, state: String },
    #[error("undefined at this intervention: {0}")]
    UndefinedRow(String),
    #[error("density not compatible with graph {graph}: violated at {assignment}")]
    NotCompatible { graph: usize, assignment: String },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
