//! Derivative-weighted norms of the linear evolution and of the solution, and the
//! scaling covariance of the solution map.

use crate::integrator::Trajectory;
use crate::picard::{picard_solve, PicardConfig, Regime, XSetup};
use crate::{Result, SolverError};
use qnorms::{nk_norms, CarlesonSetup};
use serde::Serialize;
use spectral_core::{scaling_transform, Complex64, FracParams, SpectralField, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityRow {
    pub k: usize,
    pub linear_inf: f64,
    pub linear_c: f64,
    pub solution_inf: f64,
    pub solution_c: f64,
}

/// `N^{beta,k}_{alpha,inf}` and `N^{beta,k}_{alpha,C}` for `k = 0..=k_max`, raw and divided by
/// `||a||_{Q^{beta,-1}_alpha}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityTable {
    pub q_inverse_norm: f64,
    pub rows: Vec<RegularityRow>,
    /// Same layout as `rows`, every entry divided by `q_inverse_norm` (zero for zero data).
    pub ratios: Vec<RegularityRow>,
    pub regime: Regime,
    pub picard_iterations: usize,
}

impl RegularityTable {
    /// Largest relative difference between corresponding ratio entries.
    pub fn max_relative_shift(&self, other: &RegularityTable) -> f64 {
        let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
        self.ratios
            .iter()
            .zip(&other.ratios)
            .flat_map(|(x, y)| {
                [
                    rel(x.linear_inf, y.linear_inf),
                    rel(x.linear_c, y.linear_c),
                    rel(x.solution_inf, y.solution_inf),
                    rel(x.solution_c, y.solution_c),
                ]
            })
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().chain(&self.ratios).all(|r| {
            [r.linear_inf, r.linear_c, r.solution_inf, r.solution_c].iter().all(|x| x.is_finite())
        })
    }
}

pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Tabulate the derivative norms of `exp(-t Lambda) a` and of the Picard solution from `a`.
pub fn linear_part_regularity(
    a: &SpectralField,
    times: &TimeGrid,
    p: &FracParams,
    k_max: usize,
    cfg: &PicardConfig,
) -> Result<RegularityTable> {
    if k_max > MAX_DERIVATIVE_ORDER {
        return Err(SolverError::InvalidInput(format!("k_max = {k_max} exceeds {MAX_DERIVATIVE_ORDER}")));
    }
    let q = CarlesonSetup::standard(a.grid, p.beta)?.q_inverse(a, p)?.value;
    let lin = Trajectory::linear(a, times.clone(), p.beta)?;
    let sol = picard_solve(a, times, p, cfg)?;
    let xs = XSetup::standard(a.grid, times, p.beta)?;
    let norms = |u: &Trajectory, k: usize| -> Result<(f64, f64)> {
        let (i, c) = nk_norms(u.node_fields(), times, p, k, xs.horizon, &xs.balls, xs.range)?;
        Ok((i.value, c.value))
    };
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for k in 0..=k_max {
        let (li, lc) = norms(&lin, k)?;
        let (si, sc) = norms(&sol.u, k)?;
        rows.push(RegularityRow { k, linear_inf: li, linear_c: lc, solution_inf: si, solution_c: sc });
        let d = |x: f64| if q > 0.0 { x / q } else { 0.0 };
        ratios.push(RegularityRow { k, linear_inf: d(li), linear_c: d(lc), solution_inf: d(si), solution_c: d(sc) });
    }
    Ok(RegularityTable { q_inverse_norm: q, rows, ratios, regime: sol.regime, picard_iterations: sol.iterations })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub times: Vec<f64>,
    /// `||v(t_i / lambda^{2 beta}) - u_lambda||_2 / ||u_lambda||_2` per node.
    pub relative: Vec<f64>,
    pub max_relative: f64,
}

/// Keep modes with every `|k_a| < limit`.
fn low_pass(f: &SpectralField, limit: i64) -> SpectralField {
    let g = f.grid;
    f.map_modes(|idx| {
        let k = g.k_vec(idx);
        let keep = k[..g.dim].iter().all(|&x| x.abs() < limit);
        Complex64::new(if keep { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Solve from `a` on the geometric grid `times` and from `lambda^{2 beta - 1} a(lambda x)` on
/// the same grid compressed by `lambda^{2 beta}`, then compare node by node with
/// `lambda^{2 beta - 1} u(lambda^{2 beta} t, lambda x)`.
pub fn scaling_covariance(
    a: &SpectralField,
    times: &TimeGrid,
    p: &FracParams,
    lambda: f64,
    cfg: &PicardConfig,
) -> Result<ScalingReport> {
    let (q, m) = match (times.ratio(), times.len()) {
        (Some(q), m) => (q, m),
        _ => return Err(SolverError::InvalidInput("scaling comparison needs a geometric time grid".into())),
    };
    let gamma = 2.0 * p.beta - 1.0;
    let s = lambda.powf(2.0 * p.beta);
    let small = TimeGrid::geometric(times.horizon / s, q, m)?;
    let u = picard_solve(a, times, p, cfg)?;
    let v = picard_solve(&scaling_transform(a, lambda, gamma)?, &small, p, cfg)?;
    let limit = ((a.grid.n() / 2) as f64 / lambda).floor() as i64;
    let mut rep = ScalingReport { lambda, times: small.nodes.clone(), relative: Vec::new(), max_relative: 0.0 };
    for (ui, vi) in u.u.node_fields().iter().zip(v.u.node_fields()) {
        let want = scaling_transform(&low_pass(ui, limit), lambda, gamma)?;
        let rel = vi.sub(&want)?.l2_norm() / want.l2_norm().max(f64::MIN_POSITIVE);
        rep.relative.push(rel);
        rep.max_relative = rep.max_relative.max(rel);
    }
    Ok(rep)
}
