//! Spectral representation of real fields on the periodic torus `[0, L)^n`.
//!
//! Fourier convention: `f(x) = sum_k c_k exp(i xi_k . x)` with `xi_k = 2 pi k / L`,
//! so forward coefficients carry the `1/N^n` factor and `cos(2 pi x / L)` has
//! coefficient `1/2` at `k = +-1`. Derivatives are the multiplier `i xi`.
//!
//! Odd multipliers (derivatives, divergence, the Leray projector) use a frequency
//! vector whose Nyquist component is zero, so that they map real fields to real
//! fields. Even multipliers (`|xi|^{2s}`, the heat semigroup) use the full `|xi|`.

mod fft;
pub mod field;
pub mod grid;
pub mod halfspace;
pub mod lp;
pub mod ops;
pub mod params;
pub mod qnsf;
pub mod scaling;
pub mod sum;
pub mod synth;

pub use field::SpectralField;
pub use grid::TorusGrid;
pub use halfspace::{HalfSpaceSample, TimeGrid};
pub use lp::{besov_difference_norm, besov_norm, lp_block, LittlewoodPaleyBank};
pub use ops::{
    dealias, divergence, frac_laplacian, grad_tensor_norms, heat_semigroup, leray_project,
    partial_derivative,
};
pub use params::FracParams;
pub use scaling::{refine, scaling_transform};
pub use sum::KahanSum;

pub use num_complex::Complex64;

/// Errors raised by the spectral layer.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("operation needs a vector field with {expected} components, got {got}")]
    NotVector { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("level {0} outside the Littlewood-Paley bank")]
    LevelOutOfRange(i32),
    #[error("scaling factor {0} is not a power of two")]
    NonDyadic(f64),
    #[error("field has energy at modes that alias under the requested scaling")]
    Aliasing,
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
