//! Quadrature checks of three weighted `L^2(dt / t^{alpha/beta})` estimates.
//!
//! Inputs are fields at the nodes of a time grid, usually a Gauss-in-log grid from
//! [`lemma_time_grid`]. Time integrals need the value at `s = 0`; it is taken equal to the
//! value at the first node. Every check returns `lhs / rhs` and refuses a vanishing `rhs`.

use crate::integrator::semigroup_convolve;
use crate::{Result, SolverError};
use qnorms::carleson::{carleson_sup, log_time_grid, CarlesonForm};
use qnorms::BallFamily;
use serde::Serialize;
use spectral_core::halfspace::gauss_legendre;
use spectral_core::{Complex64, FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use std::collections::BTreeMap;

/// `lhs / rhs` of one estimate with the pieces that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRatio {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// The Carleson factor entering `rhs`, when the estimate has one.
    pub carleson: Option<f64>,
    pub notes: Vec<String>,
}

impl LemmaRatio {
    fn new(check: String, lhs: f64, rhs: f64, carleson: Option<f64>, notes: Vec<String>) -> Result<Self> {
        if !(rhs > 0.0) {
            return Err(SolverError::ZeroRhs);
        }
        Ok(Self { check, lhs, rhs, ratio: lhs / rhs, carleson, notes })
    }
}

/// Gauss-in-log grid on `(0, horizon]` with breaks at every `tau <= horizon`.
pub fn lemma_time_grid(taus: &[f64], horizon: f64, order: usize, max_log_width: f64) -> Result<TimeGrid> {
    let mut b: Vec<f64> = taus.iter().copied().filter(|&t| t > 0.0 && t <= horizon).collect();
    b.push(horizon);
    Ok(log_time_grid(&b, 1e-6, order, max_log_width)?)
}

/// Balls of `grid` at the given radii, restricted to `r < 1` and `r^{2 beta} <= horizon`.
pub fn lemma_balls(grid: TorusGrid, radii: &[f64], beta: f64, horizon: f64) -> Result<BallFamily> {
    let keep: Vec<f64> = radii.iter().copied().filter(|&r| r < 1.0 && r.powf(2.0 * beta) <= horizon * (1.0 + 1e-12)).collect();
    if keep.is_empty() {
        return Err(SolverError::InvalidInput("no radius below 1 fits the horizon".into()));
    }
    Ok(BallFamily::central(grid, keep)?)
}

fn check_series(f: &[SpectralField], times: &TimeGrid) -> Result<()> {
    if f.is_empty() || f.len() != times.len() {
        return Err(SolverError::InvalidInput(format!("{} fields for {} nodes", f.len(), times.len())));
    }
    let g = f[0].grid;
    if f.iter().any(|x| x.grid != g || x.components != f[0].components) {
        return Err(SolverError::GridMismatch);
    }
    Ok(())
}

fn with_origin(f: &[SpectralField], times: &TimeGrid) -> (Vec<SpectralField>, Vec<f64>) {
    let mut fs = vec![f[0].clone()];
    fs.extend_from_slice(f);
    let pts = std::iter::once(0.0).chain(times.nodes.iter().copied()).collect();
    (fs, pts)
}

fn weighted_energy<'a, I: Iterator<Item = &'a SpectralField>>(f: I, times: &TimeGrid, a: f64) -> f64 {
    f.enumerate().map(|(i, x)| times.weight(i, a, f64::INFINITY, true) * x.l2_norm().powi(2)).sum()
}

/// `int ||A||^2 dt/t^{alpha/beta}` against `int ||f||^2 dt/t^{alpha/beta}` for
/// `A(t) = int_0^t exp(-(t-s) Lambda) Lambda f(s) ds`, `Lambda = (-Delta)^beta`.
pub fn maximal_regularity_check(f: &[SpectralField], times: &TimeGrid, p: &FracParams) -> Result<LemmaRatio> {
    check_series(f, times)?;
    let (fs, pts) = with_origin(f, times);
    let conv = semigroup_convolve(&fs, &pts, p.beta)?;
    let g = f[0].grid;
    let two_beta = 2.0 * p.beta;
    let a_t: Vec<SpectralField> = conv[1..]
        .iter()
        .map(|y| y.map_modes(|idx| Complex64::new(g.xi_norm(idx).powf(two_beta), 0.0)))
        .collect();
    let a = p.alpha / p.beta;
    LemmaRatio::new(
        "maximal regularity".into(),
        weighted_energy(a_t.iter(), times, a),
        weighted_energy(f.iter(), times, a),
        None,
        vec![format!("weight t^-{a}, horizon {}", times.horizon)],
    )
}

const GL_ORDER: usize = 8;
const MAX_PIECES: usize = 64;
const EXP_CUTOFF: f64 = 745.0;

/// `W[m][j]`: weight of `f(s_j)` in `int_0^{s_m} K(s_m, s) f(s) ds` for piecewise-linear `f`.
fn kernel_weights<K: Fn(f64, f64) -> f64>(pts: &[f64], lam: f64, kernel: K) -> Vec<Vec<f64>> {
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let mut w = vec![vec![0.0; pts.len()]; pts.len()];
    for m in 1..pts.len() {
        let t = pts[m];
        for j in 0..m {
            let (s0, s1) = (pts[j], pts[j + 1]);
            let h = s1 - s0;
            if lam * (t - s1) > EXP_CUTOFF {
                continue;
            }
            let pieces = ((lam * h / 2.0).ceil() as usize).clamp(1, MAX_PIECES);
            let dh = h / pieces as f64;
            let (mut wl, mut wr) = (0.0, 0.0);
            for q in 0..pieces {
                let a = s0 + q as f64 * dh;
                for (x, wx) in gx.iter().zip(&gw) {
                    let s = a + 0.5 * dh * (x + 1.0);
                    let k = kernel(t, s) * 0.5 * dh * wx;
                    let th = (s - s0) / h;
                    wl += k * (1.0 - th);
                    wr += k * th;
                }
            }
            w[m][j] += wl;
            w[m][j + 1] += wr;
        }
    }
    w
}

/// Weighted `L^2` bound of `P_r f(t) = int_0^t exp(-(t-s) Lambda) (t^g - s^g)^r D f(s) ds`
/// with `g = 1/(2 beta)` and `D` the radial multiplier `|xi|^{r + 2 beta}`.
pub fn pr_operator_check(f: &[SpectralField], times: &TimeGrid, p: &FracParams, r: usize) -> Result<LemmaRatio> {
    if r > 3 {
        return Err(SolverError::InvalidInput(format!("r = {r} outside 0..=3")));
    }
    check_series(f, times)?;
    let (fs, pts) = with_origin(f, times);
    let g = f[0].grid;
    let len = g.len();
    let comps = f[0].components;
    let gamma = 1.0 / (2.0 * p.beta);
    let mut by_norm: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for idx in 1..len {
        by_norm.entry(g.xi_norm(idx).to_bits()).or_default().push(idx);
    }
    let mut out = vec![SpectralField::zeros(g, comps); pts.len()];
    for (bits, modes) in &by_norm {
        let rho = f64::from_bits(*bits);
        let lam = rho.powf(2.0 * p.beta);
        let mult = rho.powf(r as f64 + 2.0 * p.beta);
        let w = kernel_weights(&pts, lam, |t, s| (-lam * (t - s)).exp() * (t.powf(gamma) - s.powf(gamma)).powi(r as i32));
        for (m, row) in w.iter().enumerate().skip(1) {
            for &idx in modes {
                for c in 0..comps {
                    let k = c * len + idx;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &wj) in row.iter().enumerate().take(m + 1) {
                        acc += fs[j].coeffs[k] * wj;
                    }
                    out[m].coeffs[k] = acc * mult;
                }
            }
        }
    }
    let a = p.alpha / p.beta;
    LemmaRatio::new(
        format!("P_{r} operator"),
        weighted_energy(out[1..].iter(), times, a),
        weighted_energy(f.iter(), times, a),
        None,
        vec![
            format!("weight t^-{a}, horizon {}", times.horizon),
            format!("gradient power |xi|^(r + 2 beta) taken as a radial multiplier, r = {r}"),
        ],
    )
}

/// `int_0^1 ||t^{k/2} |xi|^{k beta + 1} exp(-t Lambda / 2) int_0^t N||^2 dt/t^{alpha/beta}`
/// against `A(N) int_0^1 int |N| dx dt/t^{alpha/beta}`, with `A(N)` the Carleson supremum of
/// `|N|` over `balls` (radii below 1).
pub fn le5_inequality_check(n: &HalfSpaceSample, p: &FracParams, k: usize, balls: &BallFamily) -> Result<LemmaRatio> {
    let times = &n.times;
    let g = n.grid;
    if n.components != 1 {
        return Err(SolverError::InvalidInput("N must be scalar".into()));
    }
    if balls.grid != g {
        return Err(SolverError::GridMismatch);
    }
    if (times.horizon - 1.0).abs() > 1e-12 {
        return Err(SolverError::InvalidInput(format!("time grid must end at 1, ends at {}", times.horizon)));
    }
    n.check_finite()?;
    let len = g.len();
    let abs: Vec<Vec<f64>> = (0..times.len()).map(|i| (0..len).map(|j| n.get(i, 0, j).abs()).collect()).collect();
    let a = p.alpha / p.beta;
    let balls = balls.with_radii(|r| r < 1.0 && r.powf(2.0 * p.beta) <= 1.0)?;
    let (carleson, _) = carleson_sup(&abs, times, CarlesonForm::semigroup(p, g.dim), &balls)?;
    let mass: f64 = abs
        .iter()
        .enumerate()
        .map(|(i, s)| times.weight(i, a, f64::INFINITY, true) * s.iter().sum::<f64>() * g.cell_volume())
        .sum();
    // Cumulative trapezoid for int_0^t N, with N(0) = N(t_1).
    let fields: Vec<SpectralField> = (0..times.len())
        .map(|i| SpectralField::from_samples(g, 1, &n.values[i * len..(i + 1) * len]))
        .collect::<std::result::Result<_, _>>()?;
    let mut acc = SpectralField::zeros(g, 1);
    let mut prev = (0.0, fields[0].clone());
    let mut lhs = 0.0;
    let e = k as f64 * p.beta + 1.0;
    for (i, (f, &t)) in fields.iter().zip(&times.nodes).enumerate() {
        acc = acc.add(&prev.1.add(f)?.scale(0.5 * (t - prev.0)))?;
        prev = (t, f.clone());
        let v = acc.map_modes(|idx| {
            let x = g.xi_norm(idx);
            Complex64::new(t.powf(k as f64 / 2.0) * x.powf(e) * (-0.5 * t * x.powf(2.0 * p.beta)).exp(), 0.0)
        });
        lhs += times.weight(i, a, f64::INFINITY, true) * v.l2_norm().powi(2);
    }
    LemmaRatio::new(
        format!("Carleson-weighted smoothing, k = {k}"),
        lhs,
        carleson * mass,
        Some(carleson),
        vec![format!("weight t^-{a}, horizon 1, radii r < 1"), format!("multiplier |xi|^{e}")],
    )
}
