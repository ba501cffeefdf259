use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degenerate triangle {triangle}: area {area:e} below threshold {threshold:e}")]
    DegenerateTriangle {
        triangle: usize,
        area: f64,
        threshold: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field belongs to a different mesh")]
    MeshMismatch,

    #[error("surface type not supported by this operation")]
    UnsupportedSurface,

    #[error("no convergence after {iterations} iterations (last update {last_update:e}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last_update: f64,
        residual: f64,
    },

    #[error("oracle solver limited to {limit} vertices, got {got}")]
    SizeGuard { limit: usize, got: usize },

    #[error("point ({0}, {1}) is not a cut point: unique minimizing geodesic")]
    NotACutPoint(f64, f64),

    #[error("cut point is ambiguous: {} minimizing translates {:?}", .0.len(), .0)]
    AmbiguousCutPoint(Vec<(i32, i32)>),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("inclusion check failed: min gap on cut locus is {0:e}")]
    InclusionFailure(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
