//! Tent spaces over the sampled upper half-space `(0, inf) x T^n`.
//!
//! With `d = n - 2(alpha + beta - 1)` this crate provides the dyadic Hausdorff
//! `d`-capacity and its Choquet integral, the nontangential maximal function, the
//! `T^inf` norm, tent atoms with the constructive atomic decomposition of `T^1`, and
//! the duality pairing between the two spaces.

pub mod capacity;
pub mod cone;
pub mod duality;
pub mod tent;

pub use capacity::{capacity_value, choquet_integral, hausdorff_capacity, CapacityBounds, DyadicCover, DyadicCube};
pub use cone::{ball_volume, in_tent, nontangential_max, torus_distance};
pub use duality::{
    carleson_embedding_check, duality_test_function, maximal_omega, normalize_omega, pairing, power_omega, weighted_energy, OmegaCandidate,
    proof_omega, t1_norm_bracket, EmbeddingCheck, T1Bracket,
};
pub use tent::{
    atomic_decompose, t_infty_norm, validate_atom, AtomCertificate, AtomSummary, AtomicDecomposition, DecomposedAtom,
    LevelCover, TentAtom,
};

use spectral_core::{FracParams, TimeGrid};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TentError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("the set is empty")]
    EmptySet,
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("omega vanishes at node {node}, sample {sample} where F does not")]
    OmegaVanishes { node: usize, sample: usize },
    #[error("parameters violate the hypotheses: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Qnorm(#[from] qnorms::QnormError),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
}

pub type Result<T> = std::result::Result<T, TentError>;

/// Capacity dimension `d = n - 2(alpha + beta - 1)`.
pub fn capacity_dim(p: &FracParams, n: usize) -> f64 {
    n as f64 - 2.0 * p.excess()
}

/// Exponent `a` of the `t^{-a}` weight in the `T^inf` norm.
pub fn tinf_power(p: &FracParams) -> f64 {
    1.0 + 2.0 * (p.alpha - p.beta + 1.0)
}

/// Exponent `a` of the `t^{-a}` weight in the atom functional.
pub fn t1_power(p: &FracParams) -> f64 {
    1.0 - 2.0 * (p.alpha - p.beta + 1.0)
}

/// Node weights of `int g(t) t^{-a} dt` over the whole grid.
pub fn node_weights(times: &TimeGrid, a: f64) -> Vec<f64> {
    (0..times.len()).map(|i| times.weight(i, a, f64::INFINITY, false)).collect()
}
