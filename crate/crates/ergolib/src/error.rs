//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the dense linear-algebra kernels.
#[derive(Debug, Clone, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimensions must be positive")]
    EmptyMatrix,
    #[error("entry count {got} does not match shape {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular system: no usable pivot at elimination step {step}")]
    Singular { step: usize },
    #[error(
        "eigenvalue iteration did not converge for a {dim}x{dim} matrix within {iterations} steps"
    )]
    EigenNonConvergence { dim: usize, iterations: usize },
}

/// Errors from spectral decomposition.
#[derive(Debug, Clone, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("input matrix has a non-finite entry at ({row}, {col})")]
    NonFiniteInput { row: usize, col: usize },
    #[error(
        "ill-conditioned decomposition: residual {residual:.3e} exceeds tolerance {tolerance:.3e} ({detail})"
    )]
    IllConditioned {
        residual: f64,
        tolerance: f64,
        detail: String,
    },
    #[error("generalized eigenspace for eigenvalue ({re:.6e}, {im:.6e}) has dimension {found}, expected {expected}")]
    EigenspaceDefect {
        re: f64,
        im: f64,
        found: usize,
        expected: usize,
    },
    #[error("contour placement: resolvent solve failed at node z = ({re:.6e}, {im:.6e}); the circle passes too close to the spectrum")]
    ContourPlacement { re: f64, im: f64 },
    #[error("contour must have a positive radius and at least 2 nodes")]
    ContourParams,
    #[error("tolerances must be nonnegative")]
    InvalidTolerance,
}

/// Errors from trajectory evaluation and classification.
#[derive(Debug, Clone, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("initial state has dimension {got}, decomposition expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time must be nonnegative, got {t}")]
    NegativeTime { t: f64 },
    #[error("sampling horizon must be positive, got {t_max}")]
    InvalidHorizon { t_max: f64 },
}

/// Errors from Cesàro-mean and rate-bound computations.
#[derive(Debug, Clone, Error)]
pub enum ErgodicError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error("time must be positive, got {t}")]
    NonPositiveTime { t: f64 },
    #[error("quadrature needs at least 2 panels, got {n_panels}")]
    TooFewPanels { n_panels: usize },
    #[error("trajectory is unbounded: {detail}")]
    UnboundedTrajectory { detail: String },
    #[error("operator is not invertible: spectrum contains {detail}")]
    NotInvertible { detail: String },
    #[error("operator is not reducibly invertible: the eigenvalue 0 has index {index}")]
    NotReduciblyInvertible { index: usize },
    #[error("A + P is singular; P is not the projection onto ker A along R(A)")]
    ShiftNotInvertible,
    #[error("time grid must be strictly increasing and positive")]
    InvalidTimeGrid,
}

/// Errors from the sequence-space operator models.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("trajectory is unbounded: initial state has mass on atoms with positive real part at indices {indices:?}")]
    UnboundedScalar { indices: Vec<u64> },
    #[error("operation requires a diagonal operator")]
    NotDiagonal,
}
