//! Mild solutions of `u_t + (-Delta)^beta u + P div(u (x) u) = 0` on the periodic torus.
//!
//! Time lives on a [`TimeGrid`](spectral_core::TimeGrid) plus the initial instant; the
//! Duhamel integral is evaluated by an exponential integrator that integrates the
//! semigroup factor exactly against a piecewise-linear flux. [`picard_solve`] iterates
//! `u^{j+1} = u^0 + B(u^j, u^j)` and measures increments in the `X^beta_{alpha;T}` norm.
//! The [`lemmas`] module holds quadrature checks of the weighted estimates behind the
//! fixed-point argument.

pub mod flux;
pub mod integrator;
pub mod lemmas;
pub mod picard;
pub mod regularity;
pub mod residual;

pub use flux::{flux_divergence, nonlinear_flux, nonlinear_flux_sum};
pub use integrator::{bilinear_b, bilinear_b_at, bilinear_sum, semigroup_convolve, Trajectory};
pub use lemmas::{
    le5_inequality_check, lemma_time_grid, maximal_regularity_check, pr_operator_check, LemmaRatio,
};
pub use picard::{picard_solve, smallness_threshold, PicardConfig, Regime, SolverState, Threshold, XSetup};
pub use regularity::{linear_part_regularity, scaling_covariance, RegularityRow, RegularityTable, ScalingReport};
pub use residual::{residual, ResidualReport};

/// Errors of the solver layer.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("non-finite value in iteration {iteration} at time index {node}")]
    NonFinite { iteration: usize, node: usize },
    #[error("right-hand side of the estimate vanishes")]
    ZeroRhs,
    #[error("time {0} is not a node of the grid")]
    NodeNotInGrid(f64),
    #[error(transparent)]
    Qnorm(#[from] qnorms::QnormError),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
