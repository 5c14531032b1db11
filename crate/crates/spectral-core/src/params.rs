use crate::{Result, SpectralError};
use serde::{Deserialize, Serialize};

/// Smoothness pair `(alpha, beta)` with `1/2 < beta <= 1` and `alpha < beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
    /// `beta = 1` is accepted only when this is set.
    pub regularity_allows_beta_one: bool,
    /// Whether `alpha + beta - 1 >= 0`, needed by tent-space and capacity work.
    pub tent_admissible: bool,
}

impl FracParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(alpha, beta, false)
    }

    /// Same as [`FracParams::new`] but admitting `beta = 1`.
    pub fn with_beta_one(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(alpha, beta, true)
    }

    fn build(alpha: f64, beta: f64, allow_one: bool) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(SpectralError::InvalidParams("non-finite alpha or beta".into()));
        }
        let upper_ok = beta < 1.0 || (beta == 1.0 && allow_one);
        if !(beta > 0.5 && upper_ok) {
            return Err(SpectralError::InvalidParams(format!("beta = {beta} outside (1/2, 1)")));
        }
        if alpha >= beta {
            return Err(SpectralError::InvalidParams(format!("alpha = {alpha} must be below beta = {beta}")));
        }
        Ok(Self {
            alpha,
            beta,
            regularity_allows_beta_one: allow_one,
            tent_admissible: alpha + beta - 1.0 >= 0.0,
        })
    }

    /// `alpha + beta - 1`.
    pub fn excess(&self) -> f64 {
        self.alpha + self.beta - 1.0
    }

    pub fn require_tent(&self) -> Result<()> {
        if self.tent_admissible {
            Ok(())
        } else {
            Err(SpectralError::InvalidParams(format!(
                "alpha + beta - 1 = {} is negative",
                self.excess()
            )))
        }
    }
}
