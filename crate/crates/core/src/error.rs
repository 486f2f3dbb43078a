use thiserror::Error;

/// Errors raised while building images, paths, maps, spaces and planners.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("image has no points")]
    EmptyImage,

    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<i64>),

    #[error("point {point:?} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        point: Vec<i64>,
        expected: usize,
        found: usize,
    },

    #[error("c_{k} adjacency needs 1 <= k <= {dimension}")]
    AdjacencyOutOfRange { k: usize, dimension: usize },

    #[error("invalid adjacency: {0}")]
    InvalidAdjacency(String),

    #[error("image is not closed under negation: {0:?} has no antipode")]
    NotNegationSymmetric(Vec<i64>),

    #[error("origin cannot be identified with its own antipode")]
    OriginPresent,

    #[error("point index {index} out of range for image with {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path endpoint mismatch: first path ends at {end}, second starts at {start}")]
    EndpointMismatch { end: usize, start: usize },

    #[error("paths live on different images")]
    TargetMismatch,

    #[error("cannot stabilize a path of length {len} to shorter length {requested}")]
    StabilizeTooShort { len: usize, requested: usize },

    #[error("map is not digitally continuous")]
    Discontinuous,

    #[error("maps do not share source and target")]
    MapMismatch,

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("subset is empty")]
    EmptySubset,

    #[error("not a vertex of a minimal sphere: {0:?}")]
    NotSphereVertex(Vec<i64>),

    #[error("could not parse space `{0}`")]
    Parse(String),

    #[error("invalid space specification: {0}")]
    InvalidSpec(String),

    #[error("non-singular map check failed: {0}")]
    Theta(String),

    #[error("path family check failed: {0}")]
    PathFamily(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("{size} points exceeds the oracle cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
