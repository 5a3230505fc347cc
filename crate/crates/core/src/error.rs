use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice dimensions must be positive (got n={n}, n'={n_prime})")]
    ZeroDimension { n: usize, n_prime: usize },

    #[error("lattice has no boundary")]
    NoBoundary,

    #[error("boundary conditions belong to different lattices")]
    LatticeMismatch,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("site ({x}, {y}) is not on the boundary")]
    OffBoundary { x: i64, y: i64 },

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("rectangle {0} is not contained in the lattice")]
    RectOutside(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration guard exceeded: {edges} edges > limit {limit}")]
    SizeGuard { edges: usize, limit: usize },

    #[error("coupling from the past did not coalesce within {cap} updates")]
    NoCoalescence { cap: u64 },

    #[error("backends diverged at operation {index}: {detail}")]
    BackendDivergence { index: usize, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
