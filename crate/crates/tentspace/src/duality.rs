//! Weights `omega` for the `T^1` functional, the `T^1`-`T^inf` pairing and the
//! capacitary Carleson embedding.

use crate::capacity::choquet_integral;
use crate::cone::{nontangential_max, torus_distance};
use crate::tent::t_infty_norm;
use crate::{capacity_dim, node_weights, t1_power, Result, TentError};
use qnorms::carleson::p_carleson_norm;
use qnorms::{BallFamily, CubeFamily};
use serde::Serialize;
use spectral_core::{FracParams, HalfSpaceSample, KahanSum, TimeGrid, TorusGrid};

/// `r^{-d} min{1, (r / sqrt(|x - c|^2 + t^2))^{d + eps}}`.
pub fn proof_omega(times: TimeGrid, grid: TorusGrid, center: [f64; 3], r: f64, d: f64, eps: f64) -> HalfSpaceSample {
    HalfSpaceSample::from_fn(times, grid, |_, t, _, x| {
        let rho = (torus_distance(&grid, x, center).powi(2) + t * t).sqrt();
        r.powf(-d) * (r / rho).powf(d + eps).min(1.0)
    })
}

/// `|F|^s`.
pub fn power_omega(f: &HalfSpaceSample, s: f64) -> HalfSpaceSample {
    let mag = f.magnitude();
    let mut out = mag.clone();
    out.values.iter_mut().for_each(|v| *v = v.powf(s));
    out
}

/// `N(F)(x)^s`, constant in `t`.
pub fn maximal_omega(f: &HalfSpaceSample, s: f64) -> HalfSpaceSample {
    let nf = nontangential_max(f);
    let len = f.grid.len();
    let mut out = HalfSpaceSample::zeros(f.times.clone(), f.grid, 1);
    for i in 0..f.times.len() {
        for x in 0..len {
            out.set(i, 0, x, nf[x].powf(s));
        }
    }
    out
}

/// `omega / C` with `C = int N(omega) d cap_d`; returns the scaled weight and `C`.
pub fn normalize_omega(omega: &HalfSpaceSample, d: f64) -> Result<(HalfSpaceSample, f64)> {
    if omega.components != 1 || !omega.is_nonneg() {
        return Err(TentError::InvalidInput("omega must be scalar and nonnegative".into()));
    }
    let c = choquet_integral(&omega.grid, &nontangential_max(omega), d)?;
    if !(c > 0.0) {
        return Err(TentError::InvalidInput("omega has zero Choquet integral".into()));
    }
    Ok((omega.scale(1.0 / c), c))
}

/// `(int |F|^2 omega^{-1} t^{-(1 - 2(alpha - beta + 1))} dt dy)^{1/2}`; infinite if `omega`
/// vanishes where `F` does not.
pub fn weighted_energy(f: &HalfSpaceSample, omega: &HalfSpaceSample, p: &FracParams) -> f64 {
    let w = node_weights(&f.times, t1_power(p));
    let len = f.grid.len();
    let mut k = KahanSum::new();
    for (i, wi) in w.iter().enumerate() {
        for x in 0..len {
            let e = f.abs_sq(i, x);
            if e == 0.0 {
                continue;
            }
            let om = omega.get(i, 0, x);
            if om <= 0.0 {
                return f64::INFINITY;
            }
            k.add(e / om * wi);
        }
    }
    (k.value() * f.grid.cell_volume()).sqrt()
}

/// `int <F, G> dt/t dy` on the samples.
pub fn pairing(f: &HalfSpaceSample, g: &HalfSpaceSample) -> Result<f64> {
    if !f.same_layout(g) {
        return Err(TentError::GridMismatch);
    }
    let w = node_weights(&f.times, 1.0);
    let len = f.grid.len();
    let mut k = KahanSum::new();
    for (i, wi) in w.iter().enumerate() {
        for c in 0..f.components {
            for x in 0..len {
                k.add(wi * f.get(i, c, x) * g.get(i, c, x));
            }
        }
    }
    Ok(k.value() * f.grid.cell_volume())
}

/// `G = F omega^{-1} t^{2(alpha - beta + 1)}`, zero where `F` vanishes.
pub fn duality_test_function(f: &HalfSpaceSample, omega: &HalfSpaceSample, p: &FracParams) -> Result<HalfSpaceSample> {
    let e = 2.0 * (p.alpha - p.beta + 1.0);
    let len = f.grid.len();
    let mut g = HalfSpaceSample::zeros(f.times.clone(), f.grid, f.components);
    for (i, &t) in f.times.nodes.iter().enumerate() {
        for x in 0..len {
            let om = omega.get(i, 0, x);
            for c in 0..f.components {
                let v = f.get(i, c, x);
                if v == 0.0 {
                    continue;
                }
                if om <= 0.0 {
                    return Err(TentError::OmegaVanishes { node: i, sample: x });
                }
                g.set(i, c, x, v / om * t.powf(e));
            }
        }
    }
    Ok(g)
}

/// One candidate weight tried by [`t1_norm_bracket`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaCandidate {
    pub name: String,
    /// Choquet integral of `N(omega)` before normalization.
    pub choquet: f64,
    pub energy: f64,
    /// `|<F, G>| / ||G||_{T^inf}` for the associated test function.
    pub dual: f64,
}

/// Upper estimate (best normalized candidate) and dual estimate of `||F||_{T^1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct T1Bracket {
    pub upper: f64,
    pub lower: f64,
    pub best: String,
    pub candidates: Vec<OmegaCandidate>,
}

/// Tries the given weights (each normalized) and reports the bracket.
pub fn t1_norm_bracket(
    f: &HalfSpaceSample,
    omegas: &[(String, HalfSpaceSample)],
    p: &FracParams,
    balls: &BallFamily,
) -> Result<T1Bracket> {
    p.require_tent()?;
    if omegas.is_empty() {
        return Err(TentError::EmptySet);
    }
    if f.max_abs() == 0.0 {
        return Ok(T1Bracket { upper: 0.0, lower: 0.0, best: omegas[0].0.clone(), candidates: vec![] });
    }
    let d = capacity_dim(p, f.grid.dim);
    let mut candidates = Vec::new();
    for (name, om) in omegas {
        if om.grid != f.grid || om.times != f.times {
            return Err(TentError::GridMismatch);
        }
        let (norm, c) = normalize_omega(om, d)?;
        let energy = weighted_energy(f, &norm, p);
        let dual = if energy.is_finite() {
            let g = duality_test_function(f, &norm, p)?;
            let gn = t_infty_norm(&g, p, balls)?.value;
            if gn > 0.0 {
                pairing(f, &g)?.abs() / gn
            } else {
                0.0
            }
        } else {
            0.0
        };
        candidates.push(OmegaCandidate { name: name.clone(), choquet: c, energy, dual });
    }
    let best = candidates
        .iter()
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap())
        .expect("nonempty");
    let lower = candidates.iter().map(|c| c.dual).fold(0.0, f64::max);
    Ok(T1Bracket { upper: best.energy, lower, best: best.name.clone(), candidates })
}

/// Both sides of `int |f| d mu <= C A int N(f) d cap_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub lhs: f64,
    pub choquet: f64,
    /// `d/n`-Carleson constant of `mu` over the cube family.
    pub carleson: f64,
    /// `lhs / (carleson * choquet)`.
    pub ratio: f64,
}

/// `mu` is a nonnegative density in `dt dy`; `f` a sample on the same layout.
pub fn carleson_embedding_check(
    mu: &HalfSpaceSample,
    f: &HalfSpaceSample,
    d: f64,
    cubes: &CubeFamily,
) -> Result<EmbeddingCheck> {
    if mu.grid != f.grid || mu.times != f.times {
        return Err(TentError::GridMismatch);
    }
    let g = f.grid;
    let len = g.len();
    let w = mu.times.weights(0.0, f64::INFINITY, true)?;
    let mut k = KahanSum::new();
    for (i, wi) in w.iter().enumerate() {
        for x in 0..len {
            k.add(wi * f.abs_sq(i, x).sqrt() * mu.get(i, 0, x));
        }
    }
    let lhs = k.value() * g.cell_volume();
    let choquet = choquet_integral(&g, &nontangential_max(f), d)?;
    let carleson = p_carleson_norm(mu, d / g.dim as f64, cubes)?.value;
    let denom = carleson * choquet;
    let ratio = if denom > 0.0 { lhs / denom } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(EmbeddingCheck { lhs, choquet, carleson, ratio })
}
