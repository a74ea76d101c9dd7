//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by geometry, discretization, solver and I/O routines.
#[derive(Debug, Error)]
pub enum AdsError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector is not on the quadric: <x,x> + 1 = {0:e}")]
    NotOnQuadric(f64),

    #[error("direction is not tangent to the base point: <x,v> = {0:e}")]
    NotTangent(f64),

    #[error("direction is neither unit nor null: <v,v> = {0:e}")]
    BadDirection(f64),

    #[error("points are not time-related ({0})")]
    NotTimeRelated(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("boundary data needs at least 8 samples, got {0}")]
    TooFewSamples(usize),

    #[error("boundary data violates the 1-Lipschitz condition: ratio {ratio} between samples {i} and {j}")]
    LipschitzViolation { ratio: f64, i: usize, j: usize },

    #[error("boundary data is not admissible: oscillation {oscillation} is not below pi")]
    NotAdmissible { oscillation: f64 },

    #[error("point lies outside the invisible domain: {0}")]
    OutsideDomain(String),

    #[error("empty fiber: the vertical line misses the convex hull")]
    EmptyFiber,

    #[error("degenerate stencil at vertex {vertex}: {neighbors} neighbors")]
    DegenerateStencil { vertex: usize, neighbors: usize },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("spacelike condition lost: {0}")]
    SpacelikeLoss(String),

    #[error("iteration stalled: {0}")]
    Stall(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, AdsError>;
