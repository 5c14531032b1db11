//! Inequality and equivalence diagnostics built on the norm estimators.

use crate::carleson::CarlesonSetup;
use crate::family::{Cube, CubeFamily};
use crate::qspace::{pair_energy, q_norm, Samples};
use crate::{QnormError, Result};
use serde::Serialize;
use spectral_core::lp::besov_norm;
use spectral_core::ops::partial_derivative;
use spectral_core::{Complex64, FracParams, KahanSum, SpectralField};

/// The four sides of the fractional Poincare chain on one cube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareReport {
    /// `||psi - psi(I)||_{L^2(I)}`.
    pub oscillation: f64,
    /// `n^{n/4} diam^{alpha_1 - beta + 1} U(I; alpha_1)^{1/2}`.
    pub fractional_lo: f64,
    /// Same with `alpha_2`.
    pub fractional_hi: f64,
    /// `diam(I) ||grad psi||_{L^2(I)}`.
    pub gradient: f64,
}

impl PoincareReport {
    /// The two steps with explicit constant, up to relative round-off `tol`.
    pub fn explicit_steps_hold(&self, tol: f64) -> bool {
        self.oscillation <= self.fractional_lo * (1.0 + tol) && self.fractional_lo <= self.fractional_hi * (1.0 + tol)
    }

    /// `fractional_hi / gradient`, `None` when the gradient side vanishes.
    pub fn gradient_ratio(&self) -> Option<f64> {
        (self.gradient > 0.0).then(|| self.fractional_hi / self.gradient)
    }
}

pub fn poincare_check(psi: &SpectralField, cube: &Cube, alpha1: f64, alpha2: f64, beta: f64) -> Result<PoincareReport> {
    if psi.components != 1 {
        return Err(QnormError::InvalidInput("poincare check takes a scalar field".into()));
    }
    if !(0.0 <= alpha1 && alpha1 <= alpha2 && alpha2 < beta) {
        return Err(QnormError::Hypothesis(format!("need 0 <= alpha1 <= alpha2 < beta, got {alpha1}, {alpha2}, {beta}")));
    }
    let g = psi.grid;
    let n = g.dim as f64;
    let vol = g.cell_volume();
    let diam = cube.length(&g) * n.sqrt();
    let values = psi.to_samples();
    let s = Samples::new(g, 1, &values)?;
    let pts = cube.samples(&g);

    let mut m = KahanSum::new();
    pts.iter().for_each(|(i, _)| m.add(values[*i]));
    let mean = m.value() / pts.len() as f64;
    let mut osc = KahanSum::new();
    pts.iter().for_each(|(i, _)| osc.add((values[*i] - mean).powi(2)));

    let frac = |a: f64| n.powf(n / 4.0) * diam.powf(a - beta + 1.0) * pair_energy(&s, cube, a, beta).sqrt();

    let mut grad = KahanSum::new();
    for axis in 0..g.dim {
        let d = partial_derivative(psi, axis)?.to_samples();
        pts.iter().for_each(|(i, _)| grad.add(d[*i] * d[*i]));
    }
    Ok(PoincareReport {
        oscillation: (osc.value() * vol).sqrt(),
        fractional_lo: frac(alpha1),
        fractional_hi: frac(alpha2),
        gradient: diam * (grad.value() * vol).sqrt(),
    })
}

fn require_zero_mean(f: &SpectralField) -> Result<()> {
    let scale = f.max_coeff();
    for c in 0..f.components {
        if f.component(c)[0].norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(QnormError::InvalidInput("field must have zero mean".into()));
        }
    }
    Ok(())
}

/// `R_j R_k f` with symbol `-xi_j xi_k / |xi|^2` (Nyquist-zeroed frequencies).
pub fn riesz_pair(f: &SpectralField, j: usize, k: usize) -> SpectralField {
    let g = f.grid;
    f.map_modes(|idx| {
        let xi = g.xi_odd(idx);
        let x2: f64 = xi[..g.dim].iter().map(|x| x * x).sum();
        if x2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-xi[j] * xi[k] / x2, 0.0)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszReport {
    pub base: f64,
    /// `((j, k), ||R_j R_k f|| / ||f||)` in the semigroup-Carleson norm.
    pub ratios: Vec<((usize, usize), f64)>,
    pub max_ratio: f64,
}

pub fn riesz_stability_check(f: &SpectralField, p: &FracParams, setup: &CarlesonSetup) -> Result<RieszReport> {
    require_zero_mean(f)?;
    let base = setup.q_inverse(f, p)?.value;
    if base == 0.0 {
        return Err(QnormError::ZeroNorm);
    }
    let n = f.grid.dim;
    let mut ratios = Vec::new();
    for j in 0..n {
        for k in j..n {
            let v = setup.q_inverse(&riesz_pair(f, j, k), p)?.value;
            ratios.push(((j, k), v / base));
        }
    }
    let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(RieszReport { base, ratios, max_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// `max |sum_k d_k f_k - f|` over coefficients, relative to `max |f_k|`-scale of `f`.
    pub residual: f64,
    pub carleson: f64,
    pub q_components: Vec<f64>,
    pub q_sum: f64,
    /// `q_sum / carleson`; `None` for the zero field.
    pub ratio: Option<f64>,
}

/// `f_k = -d_k (-Delta)^{-1} f`, symbol `-i xi_k / |xi|^2`.
pub fn divergence_potentials(f: &SpectralField) -> Vec<SpectralField> {
    let g = f.grid;
    (0..g.dim)
        .map(|k| {
            f.map_modes(|idx| {
                let xi = g.xi_odd(idx);
                let x2: f64 = xi[..g.dim].iter().map(|x| x * x).sum();
                if x2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -xi[k] / x2)
                }
            })
        })
        .collect()
}

pub fn divergence_representation_check(
    f: &SpectralField,
    p: &FracParams,
    setup: &CarlesonSetup,
    cubes: &CubeFamily,
) -> Result<DivergenceReport> {
    if f.components != 1 {
        return Err(QnormError::InvalidInput("divergence representation takes a scalar field".into()));
    }
    require_zero_mean(f)?;
    let parts = divergence_potentials(f);
    let mut rebuilt = SpectralField::zeros(f.grid, 1);
    for (k, fk) in parts.iter().enumerate() {
        rebuilt = rebuilt.add(&partial_derivative(fk, k)?)?;
    }
    let scale = f.max_coeff();
    let residual = if scale == 0.0 { 0.0 } else { rebuilt.sub(f)?.max_coeff() / scale };
    let carleson = setup.q_inverse(f, p)?.value;
    let q_components =
        parts.iter().map(|fk| Ok(q_norm(fk, p, cubes)?.value)).collect::<Result<Vec<f64>>>()?;
    let q_sum = q_components.iter().sum::<f64>();
    let ratio = (carleson > 0.0).then(|| q_sum / carleson);
    Ok(DivergenceReport { residual, carleson, q_components, q_sum, ratio })
}

/// Which embedding an [`embedding_check`] compares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EmbeddingPair {
    /// `B^{alpha-beta+1}_{n/(alpha+beta-1), q}` into `Q^beta_alpha`, `1 <= q <= 2`.
    BesovIntoQ { q: f64 },
    /// `B^{1+n/p-2 beta}_{p, q}` into the semigroup-Carleson space.
    BesovIntoQInverse { p: f64, q: f64 },
    /// Semigroup-Carleson space into `B^{1-2 beta}_{inf, inf}`.
    QInverseIntoBesov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub pair: EmbeddingPair,
    /// Norm of the target space.
    pub target: f64,
    /// Norm of the source space.
    pub source: f64,
    /// `target / source`; `None` when both vanish.
    pub ratio: Option<f64>,
}

/// Resources an embedding check may need.
pub struct EmbeddingContext<'a> {
    pub cubes: &'a CubeFamily,
    pub setup: &'a CarlesonSetup,
}

fn semigroup_hypotheses(p: &FracParams) -> Result<()> {
    let (a, b) = (p.alpha, p.beta);
    if !(a > 0.0 && b > a.max(0.5) && b < 1.0 && a + b - 1.0 >= 0.0) {
        return Err(QnormError::Hypothesis(format!("alpha = {a}, beta = {b}")));
    }
    Ok(())
}

pub fn embedding_check(
    f: &SpectralField,
    p: &FracParams,
    pair: EmbeddingPair,
    ctx: &EmbeddingContext,
) -> Result<EmbeddingReport> {
    let n = f.grid.dim as f64;
    let (target, source) = match pair {
        EmbeddingPair::BesovIntoQ { q } => {
            let e = p.alpha + p.beta - 1.0;
            if f.grid.dim < 2 || !(p.beta > p.alpha.max(0.5) && p.beta < 1.0) || e <= 0.0 || !(1.0..=2.0).contains(&q) {
                return Err(QnormError::Hypothesis(format!(
                    "need n >= 2, max(1/2, alpha) < beta < 1, alpha + beta > 1, 1 <= q <= 2; got alpha = {}, beta = {}, q = {q}",
                    p.alpha, p.beta
                )));
            }
            (q_norm(f, p, ctx.cubes)?.value, besov_norm(f, p.alpha - p.beta + 1.0, n / e, q)?)
        }
        EmbeddingPair::BesovIntoQInverse { p: pe, q } => {
            semigroup_hypotheses(p)?;
            let crit = 1.0 + n / pe;
            if !(pe > 2.0 && pe.is_finite() && p.alpha + p.beta < crit && crit < 2.0 * p.beta && q >= 1.0) {
                return Err(QnormError::Hypothesis(format!("need 2 < p < inf, alpha + beta < 1 + n/p < 2 beta; got p = {pe}")));
            }
            (ctx.setup.q_inverse(f, p)?.value, besov_norm(f, crit - 2.0 * p.beta, pe, q)?)
        }
        EmbeddingPair::QInverseIntoBesov => {
            if !(p.beta > 0.5 && p.beta <= 1.0) {
                return Err(QnormError::Hypothesis(format!("beta = {} outside (1/2, 1]", p.beta)));
            }
            (besov_norm(f, 1.0 - 2.0 * p.beta, f64::INFINITY, f64::INFINITY)?, ctx.setup.q_inverse(f, p)?.value)
        }
    };
    let ratio = if source == 0.0 && target == 0.0 {
        None
    } else if source == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(target / source)
    };
    Ok(EmbeddingReport { pair, target, source, ratio })
}
