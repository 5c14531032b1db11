//! Pointwise decay envelopes of `d^k P grad K^beta_1` in the plane.

use crate::tensor2d::projected_gradient_profile;
use crate::{KernelError, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub beta: f64,
    pub n: usize,
    /// `M_k` for `k = 0..=k_max`.
    pub m: Vec<f64>,
    /// Radius attaining each `M_k`.
    pub witness_r: Vec<f64>,
    /// `M_k^{1/k}` for `k >= 1`.
    pub roots: Vec<f64>,
    /// Smallest `C >= 1` with `M_k <= C^k` for every `k >= 1`.
    pub fitted_c: f64,
    /// `max / min` of `roots`.
    pub root_spread: f64,
}

/// Default sampling: dense near the origin, then out to `r = 40`.
pub fn default_radii() -> Vec<f64> {
    let mut r: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
    r.extend((0..=76).map(|i| 2.0 + i as f64 * 0.5));
    r
}

/// For each `k <= k_max`: `M_k = sup_r |d^k P grad K_1(r)| (k^{-1/2beta} + r)^{n+1} / k^{k/2beta}`
/// (with `1 + r` and no normalization at `k = 0`).
pub fn decay_envelope_check(k_max: usize, beta: f64, radii: &[f64]) -> Result<DecayReport> {
    if k_max > 6 {
        return Err(KernelError::InvalidInput(format!("k_max = {k_max} exceeds 6")));
    }
    let n = 2usize;
    let mut m = Vec::new();
    let mut witness_r = Vec::new();
    for k in 0..=k_max {
        let prof = projected_gradient_profile(beta, 1.0, k, radii)?;
        let kf = k as f64;
        let (shift, norm) = if k == 0 { (1.0, 1.0) } else { (kf.powf(-0.5 / beta), kf.powf(kf * 0.5 / beta)) };
        let (mut best, mut arg) = (0.0, 0.0);
        for (r, v) in prof.radii.iter().zip(&prof.values) {
            let w = v.abs() * (shift + r).powi(n as i32 + 1) / norm;
            if w > best {
                best = w;
                arg = *r;
            }
        }
        m.push(best);
        witness_r.push(arg);
    }
    let roots: Vec<f64> = (1..=k_max).map(|k| m[k].powf(1.0 / k as f64)).collect();
    let fitted_c = roots.iter().cloned().fold(1.0, f64::max);
    let lo = roots.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = roots.iter().cloned().fold(0.0, f64::max);
    let root_spread = if roots.is_empty() { 1.0 } else { hi / lo };
    Ok(DecayReport { beta, n, m, witness_r, roots, fitted_c, root_spread })
}
