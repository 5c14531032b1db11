//! Physical-space fractional heat and Oseen kernels by radial Fourier inversion.
//!
//! The heat kernel `K^beta_t` has multiplier `exp(-t |xi|^{2 beta})`; the Oseen tensor
//! has multiplier `xi_j xi_l / |xi|^2 exp(-t |xi|^{2 beta})`. Radial integrals run over
//! Gauss-Kronrod panels aligned with the oscillation of the radial Fourier factor and
//! are cached by their full parameter set.

pub mod bessel;
pub mod decay;
pub mod profile;
pub mod quad;
pub mod radial;
pub mod tensor2d;

pub use decay::{decay_envelope_check, DecayReport};
pub use profile::{
    heat_kernel_profile, oseen_kernel_profile, oseen_parts, total_mass, OseenParts, ProfileKind, RadialProfile,
};
pub use tensor2d::{oseen_derivative_profile, projected_gradient_profile};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("quadrature did not converge at r = {r}, t = {t}")]
    NonConvergence { r: f64, t: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;
