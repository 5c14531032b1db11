//! Reproducible test-field families.

use crate::config::ExperimentConfig;
use crate::error::Result;
use serde::Serialize;
use spectral_core::synth::random_field;
use spectral_core::{SpectralField, TorusGrid};

/// Band-limited fields with `|coefficient| ~ |k|^{-slope}` and random phases; member `i`
/// comes from seed `seed + i`, so any member can be regenerated on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFamily {
    pub grid: TorusGrid,
    pub components: usize,
    pub seed: u64,
    pub count: usize,
    pub slope: f64,
    pub kmax: usize,
    pub div_free: bool,
}

impl TestFamily {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            grid: cfg.torus()?,
            components: cfg.components(),
            seed: cfg.family.seed,
            count: cfg.family.count,
            slope: cfg.family.spectrum_slope,
            kmax: cfg.family.kmax,
            div_free: cfg.family.div_free,
        })
    }

    pub fn member(&self, i: usize) -> SpectralField {
        random_field(self.grid, self.components, self.seed.wrapping_add(i as u64), self.slope, self.kmax, self.div_free)
    }

    pub fn members(&self) -> impl Iterator<Item = SpectralField> + '_ {
        (0..self.count).map(|i| self.member(i))
    }
}
