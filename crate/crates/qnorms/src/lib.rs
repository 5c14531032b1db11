//! Discrete estimators for the function-space norms of the fractional Navier-Stokes
//! setting on the torus.
//!
//! Suprema over cubes and balls run over explicit finite families ([`CubeFamily`],
//! [`BallFamily`]); every estimator returns a [`NormReport`] naming the element of the
//! family where the supremum is attained.

pub mod carleson;
pub mod checks;
pub mod family;
pub mod qspace;
pub mod report;

pub use carleson::{
    carleson_q_inverse_norm, carleson_time_grid, CarlesonSetup, nk_norms, p_carleson_norm, wavelet_carleson_norm, x_norm,
    HeatGradientWindow, RadiusRange, Window, XNorm,
};
pub use checks::{
    divergence_representation_check, embedding_check, poincare_check, riesz_stability_check, EmbeddingContext,
    EmbeddingPair, EmbeddingReport, PoincareReport,
};
pub use family::{Ball, BallFamily, Cube, CubeFamily};
pub use qspace::{bmo_beta_norm, q_norm, q_norm_samples, q_norm_translated, Samples};
pub use report::{NormReport, Quadrature, ReportParams, Witness};

pub use spectral_core::{FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum QnormError {
    #[error("the searched family is empty")]
    EmptyFamily,
    #[error("grid mismatch between field and family")]
    GridMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("window is not admissible: {0}")]
    Inadmissible(String),
    #[error("reference norm is zero")]
    ZeroNorm,
    #[error("parameters violate the hypotheses: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
}

pub type Result<T> = std::result::Result<T, QnormError>;
