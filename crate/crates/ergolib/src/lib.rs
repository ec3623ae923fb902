//! Spectral decompositions of finite-dimensional linear operators,
//! boundedness classification for solutions of `y'(t) = A y(t)`, Cesàro means
//! and their ergodic limits, and exact sequence-space models of shift and
//! diagonal (scalar-type spectral) operators.
//!
//! All numeric kernels are generic over the underlying real scalar (`f32` or
//! `f64`) through [`scalar::Real`]; the crate root exposes `f64` aliases for
//! the common types.
//!
//! ```
//! use ergolib::{complex, Matrix64, ToleranceConfig};
//! use ergolib::spectral::spectral_decompose;
//! use ergolib::evolution::classify_boundedness;
//! use ergolib::ergodic::{cesaro_limit, cesaro_mean_analytic};
//!
//! // A = diag(0, i, -1): a kernel direction, a rotation and a decay mode.
//! let a = Matrix64::from_diagonal(&[
//!     complex(0.0, 0.0),
//!     complex(0.0, 1.0),
//!     complex(-1.0, 0.0),
//! ]);
//! let f = vec![complex(1.0, 0.0), complex(1.0, 0.0), complex(1.0, 0.0)];
//!
//! let tol = ToleranceConfig::for_matrix(&a)?;
//! let d = spectral_decompose(&a, &tol)?;
//! assert!(classify_boundedness(&d, &f, &tol)?.is_bounded());
//!
//! // The Cesàro means converge to the projection of f onto ker A.
//! let limit = cesaro_limit(&d, &f, &tol)?;
//! assert_eq!(limit.limit[0], complex(1.0, 0.0));
//! let mean = cesaro_mean_analytic(&d, &f, 1e4)?;
//! assert!((mean[0] - limit.limit[0]).norm() < 1e-3);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod ergodic;
pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod scalar;
pub mod spectral;

pub use error::{ErgodicError, EvolutionError, LinalgError, ModelError, SpectralError};
pub use matrix::ComplexMatrix;
pub use scalar::{complex, real, Real, C};
pub use spectral::{SpectralDecomposition, ToleranceConfig};

/// `f64` instantiations of the core types.
pub type Matrix64 = ComplexMatrix<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Decomposition64 = SpectralDecomposition<f64>;
pub type Tolerances64 = ToleranceConfig<f64>;

/// `f32` instantiations, for callers trading accuracy for size.
pub type Matrix32 = ComplexMatrix<f32>;
pub type Complex32 = num_complex::Complex<f32>;
