//! Picard iteration `u^{j+1} = u^0 + B(u^j, u^j)` with `u^0 = exp(-t Lambda) a`.
//!
//! Iterates are advanced through their increments `d^{j+1} = B(d^j, u^j) + B(u^{j-1}, d^j)`,
//! so increments far below the size of `u` keep full relative precision.

use crate::integrator::{bilinear_sum, Trajectory};
use crate::{Result, SolverError};
use qnorms::{x_norm, BallFamily, RadiusRange};
use serde::Serialize;
use spectral_core::ops::divergence_defect;
use spectral_core::{leray_project, FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};

/// Ball family, horizon and radius convention of the `X^beta_{alpha;T}` norm.
#[derive(Debug, Clone)]
pub struct XSetup {
    pub horizon: f64,
    pub balls: BallFamily,
    pub range: RadiusRange,
}

impl XSetup {
    /// Central balls with radii `r_0, r_0 / 2, ...` down to `2h`, where `r_0 = min(L/4, T^{1/(2 beta)})`.
    pub fn standard(grid: TorusGrid, times: &TimeGrid, beta: f64) -> Result<Self> {
        let mut r = (grid.period / 4.0).min(times.horizon.powf(1.0 / (2.0 * beta)));
        let mut radii = vec![r];
        while r / 2.0 >= 2.0 * grid.spacing() * (1.0 - 1e-12) {
            r /= 2.0;
            radii.push(r);
        }
        Ok(Self { horizon: times.horizon, balls: BallFamily::central(grid, radii)?, range: RadiusRange::PowerBeta })
    }

    /// `||u||_{X^beta_{alpha;T}}` over the grid nodes of `u` (the instant `t = 0` excluded).
    pub fn norm(&self, u: &Trajectory, p: &FracParams) -> Result<f64> {
        let s = HalfSpaceSample::from_fields(u.times.clone(), u.node_fields())?;
        Ok(x_norm(&s, p, self.horizon, &self.balls, self.range)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    /// Largest number of increments computed.
    pub j_max: usize,
    /// Stop once `||u^{j+1} - u^j||_X <= tol ||u^0||_X`.
    pub tol: f64,
    /// Stop as soon as a contraction ratio exceeds this value.
    pub abort_ratio: Option<f64>,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { j_max: 40, tol: 1e-10, abort_ratio: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Contracting,
    /// Some contraction ratio reached 1.
    OutsideSmallData,
}

/// Result of a Picard run.
#[derive(Debug, Clone, Serialize)]
pub struct SolverState {
    #[serde(skip)]
    pub u: Trajectory,
    /// Number of increments computed; `u` is `u^iterations`.
    pub iterations: usize,
    /// `||u^0||_X`.
    pub linear_norm: f64,
    /// `increments[j] = ||u^{j+1} - u^j||_X`.
    pub increments: Vec<f64>,
    /// `ratios[j - 1] = increments[j] / increments[j - 1]`.
    pub ratios: Vec<f64>,
    /// Divergence defect of the final iterate per time point (`t = 0` first).
    pub divergence: Vec<f64>,
    /// Largest divergence defect over every iterate and time point.
    pub max_divergence: f64,
    pub regime: Regime,
    pub converged: bool,
    pub warnings: Vec<String>,
}

fn defects(u: &Trajectory) -> Result<Vec<f64>> {
    u.fields.iter().map(|f| Ok(divergence_defect(f)?)).collect()
}

const DIVERGENCE_WARN: f64 = 1e-10;

/// Run the Picard iteration for initial data `a` on `times`.
pub fn picard_solve(a: &SpectralField, times: &TimeGrid, p: &FracParams, cfg: &PicardConfig) -> Result<SolverState> {
    picard_with(a, times, p, cfg, &XSetup::standard(a.grid, times, p.beta)?)
}

pub(crate) fn picard_with(
    a: &SpectralField,
    times: &TimeGrid,
    p: &FracParams,
    cfg: &PicardConfig,
    xs: &XSetup,
) -> Result<SolverState> {
    if a.components != a.grid.dim {
        return Err(SolverError::InvalidInput("initial data must be a vector field".into()));
    }
    if times.len() < 8 {
        return Err(SolverError::InvalidInput(format!("solver needs at least 8 time nodes, got {}", times.len())));
    }
    if cfg.j_max == 0 || !(cfg.tol >= 0.0) {
        return Err(SolverError::InvalidInput("need j_max >= 1 and tol >= 0".into()));
    }
    let mut warnings = Vec::new();
    let a = if divergence_defect(a)? > DIVERGENCE_WARN {
        warnings.push("initial data was not divergence-free and has been Leray-projected".to_string());
        leray_project(a)?
    } else {
        a.clone()
    };
    let u0 = Trajectory::linear(&a, times.clone(), p.beta)?;
    let d0 = xs.norm(&u0, p)?;
    let mut max_div = defects(&u0)?.into_iter().fold(0.0, f64::max);
    let mut state = SolverState {
        u: u0.clone(),
        iterations: 0,
        linear_norm: d0,
        increments: Vec::new(),
        ratios: Vec::new(),
        divergence: Vec::new(),
        max_divergence: 0.0,
        regime: Regime::Contracting,
        converged: false,
        warnings,
    };
    let mut prev = Trajectory::zeros(times.clone(), a.grid, a.components);
    let mut delta = u0.clone();
    let mut u = u0;
    for j in 0..cfg.j_max {
        let next = if j == 0 {
            bilinear_sum(&[(&u, &u)], p)?
        } else {
            bilinear_sum(&[(&delta, &u), (&prev, &delta)], p)?
        };
        if let Some(node) = next.is_finite() {
            return Err(SolverError::NonFinite { iteration: j + 1, node });
        }
        let inc = xs.norm(&next, p)?;
        if !inc.is_finite() {
            return Err(SolverError::NonFinite { iteration: j + 1, node: 0 });
        }
        let unew = u.add(&next)?;
        if let Some(node) = unew.is_finite() {
            return Err(SolverError::NonFinite { iteration: j + 1, node });
        }
        max_div = defects(&unew)?.into_iter().fold(max_div, f64::max);
        prev = std::mem::replace(&mut u, unew);
        delta = next;
        state.iterations = j + 1;
        if let Some(&last) = state.increments.last() {
            if last > 0.0 {
                let r = inc / last;
                state.ratios.push(r);
                if r >= 1.0 {
                    state.regime = Regime::OutsideSmallData;
                }
                if cfg.abort_ratio.is_some_and(|cap| r > cap) {
                    state.increments.push(inc);
                    break;
                }
            }
        }
        state.increments.push(inc);
        if inc <= cfg.tol * d0 {
            state.converged = true;
            break;
        }
    }
    state.divergence = defects(&u)?;
    state.max_divergence = max_div;
    state.u = u;
    Ok(state)
}

/// Bracket of the largest amplitude at which the iteration contracts.
#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    /// Largest amplitude found contracting, in units of `||exp(-t Lambda) a||_X`.
    pub amplitude: f64,
    /// Smallest amplitude found not contracting.
    pub upper: f64,
    /// Multiply `a` by this to reach `amplitude`.
    pub data_scale: f64,
    /// `||exp(-t Lambda) a||_X` of the unscaled data.
    pub linear_norm: f64,
    /// Every probe as `(amplitude, contracting)`.
    pub probes: Vec<(f64, bool)>,
}

/// Ratio bound defining contraction, and the iterations it is required on.
pub const CONTRACTION_BOUND: f64 = 2.0 / 3.0;
pub const CONTRACTION_ITERATIONS: usize = 6;

/// Locate the contraction threshold of the data direction `a` by bisection on the amplitude.
///
/// An amplitude contracts if `CONTRACTION_ITERATIONS + 1` increments can be computed with
/// every ratio at most [`CONTRACTION_BOUND`]; numerical failures count as not contracting.
/// The bracket is narrowed until `upper / amplitude <= 1 + rel`.
pub fn smallness_threshold(a: &SpectralField, times: &TimeGrid, p: &FracParams, rel: f64) -> Result<Threshold> {
    if !(rel > 0.0) {
        return Err(SolverError::InvalidInput("relative bracket width must be positive".into()));
    }
    let xs = XSetup::standard(a.grid, times, p.beta)?;
    let a = leray_project(a)?;
    let lin = xs.norm(&Trajectory::linear(&a, times.clone(), p.beta)?, p)?;
    if !(lin > 0.0) {
        return Err(SolverError::InvalidInput("data direction has zero X norm".into()));
    }
    let cfg = PicardConfig { j_max: CONTRACTION_ITERATIONS + 1, tol: 0.0, abort_ratio: Some(CONTRACTION_BOUND) };
    let mut probes = Vec::new();
    let mut contracts = |amp: f64| -> bool {
        let ok = match picard_with(&a.scale(amp / lin), times, p, &cfg, &xs) {
            Ok(s) => s.ratios.iter().all(|&r| r <= CONTRACTION_BOUND) && s.iterations == cfg.j_max,
            Err(_) => false,
        };
        probes.push((amp, ok));
        ok
    };
    let (mut lo, mut hi);
    if contracts(1.0) {
        lo = 1.0;
        hi = 2.0;
        while contracts(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e30 {
                return Err(SolverError::InvalidInput("no loss of contraction up to amplitude 1e30".into()));
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while !contracts(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-30 {
                return Err(SolverError::InvalidInput("no contraction down to amplitude 1e-30".into()));
            }
        }
    }
    while hi / lo > 1.0 + rel {
        let mid = (lo * hi).sqrt();
        if contracts(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold { amplitude: lo, upper: hi, data_scale: lo / lin, linear_norm: lin, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::synth::random_field;
    use std::f64::consts::PI;

    fn setup() -> (TorusGrid, FracParams, TimeGrid) {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        (g, FracParams::new(0.3, 0.75).unwrap(), TimeGrid::geometric(1.0, 1.4, 10).unwrap())
    }

    #[test]
    fn zero_data_stops_after_one_iteration() {
        let (g, p, t) = setup();
        let s = picard_solve(&SpectralField::zeros(g, 2), &t, &p, &PicardConfig::default()).unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.converged);
        assert!(s.u.fields.iter().all(|f| f.max_coeff() == 0.0));
    }

    #[test]
    fn small_data_contracts_and_stays_solenoidal() {
        let (g, p, t) = setup();
        let a = random_field(g, 2, 3, 1.0, 3, true).scale(1e-3);
        let s = picard_solve(&a, &t, &p, &PicardConfig::default()).unwrap();
        assert!(s.converged);
        assert_eq!(s.regime, Regime::Contracting);
        assert!(s.ratios.iter().all(|&r| r < 0.1), "{:?}", s.ratios);
        assert!(s.max_divergence < 1e-10);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn compressible_data_is_projected_with_a_warning() {
        let (g, p, t) = setup();
        let a = random_field(g, 2, 3, 1.0, 3, false).scale(1e-3);
        let s = picard_solve(&a, &t, &p, &PicardConfig::default()).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.max_divergence < 1e-10);
    }

    #[test]
    fn large_data_is_flagged_not_failed() {
        let (g, p, t) = setup();
        let a = random_field(g, 2, 3, 1.0, 3, true);
        let th = smallness_threshold(&a, &t, &p, 0.05).unwrap();
        assert!(th.upper / th.amplitude <= 1.05);
        let big = a.scale(4.0 * th.upper / th.linear_norm);
        let cfg = PicardConfig { j_max: 6, ..Default::default() };
        match picard_solve(&big, &t, &p, &cfg) {
            Ok(s) => assert_eq!(s.regime, Regime::OutsideSmallData),
            Err(e) => assert!(matches!(e, SolverError::NonFinite { .. }), "{e}"),
        }
    }
}
