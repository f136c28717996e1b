use thiserror::Error;

/// Errors produced by the exact-algebra and numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow in exact Laurent arithmetic")]
    ArithmeticOverflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("quiver is not acyclic; witness cycle through vertices {witness:?}")]
    CyclicQuiver { witness: Vec<usize> },

    #[error("vertex index {index} out of range 1..={n}")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("underlying graph is not an ADE Dynkin diagram: {0}")]
    NotDynkin(String),

    #[error("operation requires a type-A quiver: {0}")]
    NotTypeA(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid central charge: {0}")]
    InvalidCharge(String),

    #[error("induced pre-stability condition is not a stability condition (open = false, gldim = {gldim}, Re(s) = {s_re})")]
    NotOpen { gldim: f64, s_re: f64 },

    #[error("path passes within {dist:.3e} of the hyperplane of root {root:?} (limit {r_min:.3e})")]
    HyperplaneProximity {
        root: Vec<i64>,
        dist: f64,
        r_min: f64,
    },

    #[error("ODE tolerance {tol:.3e} not met within {max_steps} steps")]
    ToleranceNotMet { tol: f64, max_steps: usize },

    #[error("unsupported parameter range: {0}")]
    UnsupportedRange(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
