//! Carleson-type norms on the discretized upper half-space.
//!
//! Every norm here has the shape `sup_{x, r} s(r) int_0^{tau(r)} int_{|y - x| < r} G(t, y) t^{-a} dy dt`
//! for a nonnegative sampled density `G`. The time integral uses the per-node weights of a
//! [`TimeGrid`]; the ball integral is a periodic convolution with the ball indicator.

use crate::family::{ball_offsets, Ball, BallFamily, CubeFamily};
use crate::qspace::arg_max;
use crate::report::{NormReport, Quadrature, ReportParams, Witness};
use crate::{QnormError, Result};
use serde::Serialize;
use spectral_core::ops::{multi_derivative, multi_indices};
use spectral_core::{heat_semigroup, Complex64, FracParams, HalfSpaceSample, KahanSum, SpectralField, TimeGrid, TorusGrid};

/// Which radii a Carleson supremum ranges over for a horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum RadiusRange {
    /// `r^{2 beta} <= T`.
    #[default]
    PowerBeta,
    /// `r < T`.
    Linear,
}

impl RadiusRange {
    pub fn admits(&self, r: f64, beta: f64, horizon: f64) -> bool {
        match self {
            RadiusRange::PowerBeta => r.powf(2.0 * beta) <= horizon * (1.0 + 1e-12),
            RadiusRange::Linear => r < horizon,
        }
    }

    fn note(&self) -> &'static str {
        match self {
            RadiusRange::PowerBeta => "r-range: r^{2 beta} <= T",
            RadiusRange::Linear => "r-range: r < T",
        }
    }
}

/// Gauss-in-log time grid with a break at every `tau` and one at `floor * min(tau)`.
pub fn log_time_grid(taus: &[f64], floor: f64, order: usize, max_log_width: f64) -> Result<TimeGrid> {
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lo > 0.0) || !(floor > 0.0 && floor < 1.0) {
        return Err(QnormError::InvalidInput("time breaks must be positive with 0 < floor < 1".into()));
    }
    let mut breaks = vec![lo * floor];
    breaks.extend_from_slice(taus);
    Ok(TimeGrid::gauss_log(&breaks, order, max_log_width)?)
}

/// Time grid resolving `int_0^{r^{2 beta}}` exactly at every radius of `balls`.
pub fn carleson_time_grid(balls: &BallFamily, beta: f64) -> Result<TimeGrid> {
    let taus: Vec<f64> = balls.radii.iter().map(|r| r.powf(2.0 * beta)).collect();
    log_time_grid(&taus, 1e-12, 10, 0.5)
}

/// Shape of one Carleson functional.
#[derive(Debug, Clone, Copy)]
pub struct CarlesonForm {
    /// Power in the time weight `t^{-a}`.
    pub a: f64,
    /// Whether the first time cell extends down to `t = 0`.
    pub from_zero: bool,
    /// Upper time limit as `r^{tau_power}`.
    pub tau_power: f64,
    /// Prefactor `r^{scale_power}`.
    pub scale_power: f64,
}

impl CarlesonForm {
    /// `r^{2 alpha - n + 2 beta - 2} int_0^{r^{2 beta}} ... t^{-alpha/beta} dt`.
    pub fn semigroup(p: &FracParams, n: usize) -> Self {
        Self {
            a: p.alpha / p.beta,
            from_zero: true,
            tau_power: 2.0 * p.beta,
            scale_power: 2.0 * p.alpha - n as f64 + 2.0 * p.beta - 2.0,
        }
    }

    /// `r^{2 alpha - n + 2 beta - 2} int_0^r ... t^{-(1 + 2(alpha - beta + 1))} dt`.
    pub fn wavelet(p: &FracParams, n: usize) -> Self {
        Self {
            a: 1.0 + 2.0 * (p.alpha - p.beta + 1.0),
            from_zero: false,
            tau_power: 1.0,
            scale_power: 2.0 * p.alpha - n as f64 + 2.0 * p.beta - 2.0,
        }
    }
}

/// Squared supremum and its ball for densities `slices[i][x]` on `times`.
pub fn carleson_sup(
    slices: &[Vec<f64>],
    times: &TimeGrid,
    form: CarlesonForm,
    balls: &BallFamily,
) -> Result<(f64, Ball)> {
    let grid = balls.grid;
    let len = grid.len();
    if slices.len() != times.len() || slices.iter().any(|s| s.len() != len) {
        return Err(QnormError::GridMismatch);
    }
    let top = times.hi.last().copied().unwrap_or(0.0);
    let mut best = (f64::NEG_INFINITY, Ball { center: balls.centers[0], radius: balls.radii[0] });
    for &r in &balls.radii {
        let tau = r.powf(form.tau_power);
        if tau > top * (1.0 + 1e-12) {
            return Err(QnormError::InvalidInput(format!(
                "time grid ends at {top} but radius {r} needs {tau}"
            )));
        }
        let w = times.weights(form.a, tau, form.from_zero)?;
        let mut g = vec![0.0; len];
        for (x, gx) in g.iter_mut().enumerate() {
            let mut k = KahanSum::new();
            for (wi, s) in w.iter().zip(slices) {
                if *wi != 0.0 {
                    k.add(wi * s[x]);
                }
            }
            *gx = k.value();
        }
        let sums = ball_sums(&grid, &g, r)?;
        let scale = r.powf(form.scale_power) * grid.cell_volume();
        for &c in &balls.centers {
            let v = scale * sums[c].max(0.0);
            if v > best.0 {
                best = (v, Ball { center: c, radius: r });
            }
        }
    }
    Ok(best)
}

/// `sum_{|y - x| < r} g(y)` for every grid point `x` (periodic).
pub fn ball_sums(grid: &TorusGrid, g: &[f64], r: f64) -> Result<Vec<f64>> {
    let len = grid.len();
    let mut ind = vec![0.0; len];
    for d in ball_offsets(grid, r) {
        ind[grid.flat_wrapped(&d)] = 1.0;
    }
    let gf = SpectralField::from_samples(*grid, 1, g)?;
    let bf = SpectralField::from_samples(*grid, 1, &ind)?;
    let mut prod = gf.clone();
    for (z, b) in prod.coeffs.iter_mut().zip(&bf.coeffs) {
        *z *= b * len as f64;
    }
    Ok(prod.to_samples())
}

fn semigroup_params(p: &FracParams, horizon: f64, grid: TorusGrid) -> ReportParams {
    ReportParams { alpha: Some(p.alpha), beta: Some(p.beta), horizon: Some(horizon), grid }
}

fn time_quadrature(grid: TorusGrid, times: &TimeGrid) -> Quadrature {
    Quadrature { grid, time_nodes: times.len(), excluded_diagonal: false, rates: vec![] }
}

fn admitted_balls(balls: &BallFamily, beta: f64, horizon: f64, range: RadiusRange) -> Result<BallFamily> {
    balls.with_radii(|r| range.admits(r, beta, horizon))
}

/// Heat extension `exp(-t_i (-Delta)^beta) f` at every node.
pub fn heat_extension(f: &SpectralField, beta: f64, times: &TimeGrid) -> Result<Vec<SpectralField>> {
    times.nodes.iter().map(|&t| Ok(heat_semigroup(f, t, beta)?)).collect()
}

/// The `Q^{beta,-1}_{alpha;T}` norm: Carleson functional of `|K_t * f|^2`.
pub fn carleson_q_inverse_norm(
    f: &SpectralField,
    p: &FracParams,
    horizon: f64,
    balls: &BallFamily,
    times: &TimeGrid,
    range: RadiusRange,
) -> Result<NormReport> {
    if balls.grid != f.grid {
        return Err(QnormError::GridMismatch);
    }
    let fam = admitted_balls(balls, p.beta, horizon, range)?;
    let slices: Vec<Vec<f64>> =
        heat_extension(f, p.beta, times)?.iter().map(|u| u.pointwise_sq_magnitude()).collect();
    let (v, ball) = carleson_sup(&slices, times, CarlesonForm::semigroup(p, f.grid.dim), &fam)?;
    Ok(NormReport::new(
        "Q^{beta,-1}_{alpha;T}",
        v.max(0.0).sqrt(),
        Witness::ball(&f.grid, ball),
        semigroup_params(p, horizon, f.grid),
        time_quadrature(f.grid, times),
    )
    .note(range.note()))
}

/// Horizon, balls, time grid and radius convention for repeated semigroup-Carleson evaluations.
#[derive(Debug, Clone)]
pub struct CarlesonSetup {
    pub horizon: f64,
    pub balls: BallFamily,
    pub times: TimeGrid,
    pub range: RadiusRange,
}

impl CarlesonSetup {
    /// Standard balls of `grid`, infinite horizon, time grid resolving every radius.
    pub fn standard(grid: TorusGrid, beta: f64) -> Result<Self> {
        let balls = BallFamily::standard(grid)?;
        let times = carleson_time_grid(&balls, beta)?;
        Ok(Self { horizon: f64::INFINITY, balls, times, range: RadiusRange::PowerBeta })
    }

    pub fn q_inverse(&self, f: &SpectralField, p: &FracParams) -> Result<NormReport> {
        carleson_q_inverse_norm(f, p, self.horizon, &self.balls, &self.times, self.range)
    }
}

/// Both parts of the `X^beta_{alpha;T}` norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XNorm {
    pub value: f64,
    pub linf: NormReport,
    pub carleson: NormReport,
}

/// `sup_t t^{1 - 1/(2 beta)} ||g(t)||_inf + (Carleson part)^{1/2}` for a sampled `g`.
pub fn x_norm(
    g: &HalfSpaceSample,
    p: &FracParams,
    horizon: f64,
    balls: &BallFamily,
    range: RadiusRange,
) -> Result<XNorm> {
    if balls.grid != g.grid {
        return Err(QnormError::GridMismatch);
    }
    g.check_finite()?;
    let len = g.grid.len();
    let exp = 1.0 - 1.0 / (2.0 * p.beta);
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut slices = Vec::with_capacity(g.times.len());
    for (i, &t) in g.times.nodes.iter().enumerate() {
        let s: Vec<f64> = (0..len).map(|j| g.abs_sq(i, j)).collect();
        if t <= horizon * (1.0 + 1e-12) {
            let m = s.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt() * t.powf(exp);
            if m > best.1 {
                best = (i, m);
            }
        }
        slices.push(s);
    }
    if best.1 < 0.0 {
        return Err(QnormError::InvalidInput("no time node inside (0, T]".into()));
    }
    let params = semigroup_params(p, horizon, g.grid);
    let linf = NormReport::new(
        "X^beta_{alpha;T} sup part",
        best.1,
        Witness::Time { index: best.0, t: g.times.nodes[best.0] },
        params.clone(),
        time_quadrature(g.grid, &g.times),
    );
    let fam = admitted_balls(balls, p.beta, horizon, range)?;
    let (v, ball) = carleson_sup(&slices, &g.times, CarlesonForm::semigroup(p, g.grid.dim), &fam)?;
    let carleson = NormReport::new(
        "X^beta_{alpha;T} Carleson part",
        v.max(0.0).sqrt(),
        Witness::ball(&g.grid, ball),
        params,
        time_quadrature(g.grid, &g.times),
    )
    .note(range.note());
    Ok(XNorm { value: linf.value + carleson.value, linf, carleson })
}

/// Largest admissible derivative amplification `2^k`.
pub const NYQUIST_GUARD: f64 = 1e6;

/// `N^{beta,k}_{alpha,inf}` and `N^{beta,k}_{alpha,C}` of a time-indexed field.
pub fn nk_norms(
    u: &[SpectralField],
    times: &TimeGrid,
    p: &FracParams,
    k: usize,
    horizon: f64,
    balls: &BallFamily,
    range: RadiusRange,
) -> Result<(NormReport, NormReport)> {
    if 2f64.powi(k as i32) > NYQUIST_GUARD {
        return Err(QnormError::InvalidInput(format!("derivative order {k} exceeds the resolution guard")));
    }
    let first = u.first().ok_or(QnormError::InvalidInput("empty time series".into()))?;
    let w = k as f64 / (2.0 * p.beta);
    let mut best: Option<(XNorm, Vec<usize>, Vec<usize>)> = None;
    let mut best_inf = f64::NEG_INFINITY;
    let mut best_c = f64::NEG_INFINITY;
    let mut wit_inf = (Vec::new(), Witness::None);
    let mut wit_c = (Vec::new(), Witness::None);
    for gamma in multi_indices(first.grid.dim, k) {
        let d: Vec<SpectralField> =
            u.iter().map(|f| multi_derivative(f, &gamma)).collect::<std::result::Result<_, _>>()?;
        let sample = HalfSpaceSample::from_fields(times.clone(), &d)?.time_weighted(|t| t.powf(w));
        let x = x_norm(&sample, p, horizon, balls, range)?;
        if x.linf.value > best_inf {
            best_inf = x.linf.value;
            wit_inf = (gamma.clone(), x.linf.witness.clone());
        }
        if x.carleson.value > best_c {
            best_c = x.carleson.value;
            wit_c = (gamma.clone(), x.carleson.witness.clone());
        }
        if best.is_none() {
            best = Some((x, gamma.clone(), gamma));
        }
    }
    let (base, _, _) = best.expect("at least one multi-index");
    let mut n_inf = base.linf;
    n_inf.norm = format!("N^{{beta,{k}}}_{{alpha,inf}}");
    n_inf.value = best_inf;
    n_inf.witness = Witness::Derivative { gamma: wit_inf.0, inner: Box::new(wit_inf.1) };
    let mut n_c = base.carleson;
    n_c.norm = format!("N^{{beta,{k}}}_{{alpha,C}}");
    n_c.value = best_c;
    n_c.witness = Witness::Derivative { gamma: wit_c.0, inner: Box::new(wit_c.1) };
    Ok((n_inf, n_c))
}

/// Fourier symbol of a (possibly vector) analyzing window `phi`, evaluated at `xi`.
///
/// The dilate `phi_t(x) = t^{-n} phi(x / t)` has symbol `symbol(t xi)`.
pub trait Window: Sync {
    fn channels(&self, dim: usize) -> usize;
    fn symbol(&self, channel: usize, xi: [f64; 3]) -> Complex64;
    fn name(&self) -> String;
}

/// `phi_j = d_j K^beta_1` for every axis `j`: symbol `i xi_j exp(-|xi|^{2 beta})`.
#[derive(Debug, Clone, Copy)]
pub struct HeatGradientWindow {
    pub beta: f64,
}

impl Window for HeatGradientWindow {
    fn channels(&self, dim: usize) -> usize {
        dim
    }

    fn symbol(&self, channel: usize, xi: [f64; 3]) -> Complex64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        Complex64::new(0.0, xi[channel] * (-r2.powf(self.beta)).exp())
    }

    fn name(&self) -> String {
        format!("grad K^{}_1", self.beta)
    }
}

/// Numerical admissibility of a window symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    /// `max_c |symbol_c(0)|`.
    pub mean: f64,
    /// `max |symbol(xi)| / |xi|` over `|xi| in [1e-6, 1e-1]`.
    pub small_xi_slope: f64,
    /// `max |symbol(xi)|` at `|xi| = 1e3`, relative to the peak over `|xi| <= 10`.
    pub tail: f64,
    pub admissible: bool,
}

pub fn check_window(window: &dyn Window, dim: usize) -> Admissibility {
    let dirs: Vec<[f64; 3]> = {
        let mut v = Vec::new();
        for a in 0..dim {
            let mut e = [0.0; 3];
            e[a] = 1.0;
            v.push(e);
        }
        let s = 1.0 / (dim as f64).sqrt();
        v.push([s, if dim > 1 { s } else { 0.0 }, if dim > 2 { s } else { 0.0 }]);
        v
    };
    let at = |c: usize, d: &[f64; 3], r: f64| window.symbol(c, [d[0] * r, d[1] * r, d[2] * r]).norm();
    let chans = window.channels(dim);
    let mut mean: f64 = 0.0;
    let mut slope: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for c in 0..chans {
        mean = mean.max(window.symbol(c, [0.0; 3]).norm());
        for d in &dirs {
            for e in 1..=6 {
                let r = 10f64.powi(-e);
                slope = slope.max(at(c, d, r) / r);
            }
            for m in 1..=100 {
                peak = peak.max(at(c, d, 0.1 * m as f64));
            }
            tail = tail.max(at(c, d, 1e3));
        }
    }
    let tail = if peak > 0.0 { tail / peak } else { f64::INFINITY };
    let admissible = mean <= 1e-14 && slope.is_finite() && slope <= 1e3 && tail <= 1e-8 && peak > 0.0;
    Admissibility { mean, small_xi_slope: slope, tail, admissible }
}

/// `sum_c |f * phi_{c,t}|^2` at every node.
pub fn window_slices(f: &SpectralField, window: &dyn Window, times: &TimeGrid) -> Vec<Vec<f64>> {
    let g = f.grid;
    let chans = window.channels(g.dim);
    times
        .nodes
        .iter()
        .map(|&t| {
            let mut acc = vec![0.0; g.len()];
            for c in 0..chans {
                let filt = f.map_modes(|idx| {
                    let xi = g.xi_odd(idx);
                    window.symbol(c, [t * xi[0], t * xi[1], t * xi[2]])
                });
                for (a, v) in acc.iter_mut().zip(filt.pointwise_sq_magnitude()) {
                    *a += v;
                }
            }
            acc
        })
        .collect()
}

/// Time grid with breaks at every ball radius, for [`wavelet_carleson_norm`].
pub fn wavelet_time_grid(balls: &BallFamily) -> Result<TimeGrid> {
    log_time_grid(&balls.radii, 1e-6, 10, 0.5)
}

/// `sup r^{2 alpha - n + 2 beta - 2} int_0^r int_{|y-x|<r} |f * phi_t|^2 t^{-(1 + 2(alpha - beta + 1))}`.
pub fn wavelet_carleson_norm(
    f: &SpectralField,
    window: &dyn Window,
    p: &FracParams,
    balls: &BallFamily,
    times: &TimeGrid,
) -> Result<NormReport> {
    if balls.grid != f.grid {
        return Err(QnormError::GridMismatch);
    }
    let adm = check_window(window, f.grid.dim);
    if !adm.admissible {
        return Err(QnormError::Inadmissible(format!("{adm:?}")));
    }
    let slices = window_slices(f, window, times);
    let (v, ball) = carleson_sup(&slices, times, CarlesonForm::wavelet(p, f.grid.dim), balls)?;
    Ok(NormReport::new(
        "wavelet Carleson",
        v.max(0.0).sqrt(),
        Witness::ball(&f.grid, ball),
        semigroup_params(p, f64::INFINITY, f.grid),
        time_quadrature(f.grid, times),
    )
    .note(format!("window: {}", window.name()))
    .note(format!("time integral from t = {} (first cell edge)", times.lo[0].max(times.hi[0]))))
}

/// Density `|f * phi_t|^2 t^{-1 - 2(alpha - beta + 1)}` of the measure `mu_{f, phi}`.
pub fn wavelet_measure(
    f: &SpectralField,
    window: &dyn Window,
    p: &FracParams,
    times: &TimeGrid,
) -> HalfSpaceSample {
    let a = 1.0 + 2.0 * (p.alpha - p.beta + 1.0);
    let slices = window_slices(f, window, times);
    let mut out = HalfSpaceSample::zeros(times.clone(), f.grid, 1);
    let len = f.grid.len();
    for (i, s) in slices.iter().enumerate() {
        let w = times.nodes[i].powf(-a);
        out.values[i * len..(i + 1) * len].iter_mut().zip(s).for_each(|(o, v)| *o = v * w);
    }
    out
}

/// `sup_I mu(S(I)) / l(I)^{n p}` over the Carleson boxes `S(I) = (0, l(I)) x I`.
pub fn p_carleson_norm(mu: &HalfSpaceSample, p_exp: f64, cubes: &CubeFamily) -> Result<NormReport> {
    if cubes.grid != mu.grid {
        return Err(QnormError::GridMismatch);
    }
    if mu.components != 1 {
        return Err(QnormError::InvalidInput("measure density must be scalar".into()));
    }
    if !mu.is_nonneg() {
        return Err(QnormError::InvalidInput("measure density has negative samples".into()));
    }
    let g = mu.grid;
    let len = g.len();
    let vol = g.cell_volume();
    let mut cache: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut vals = Vec::with_capacity(cubes.len());
    for c in &cubes.cubes {
        let l = c.length(&g);
        let pos = match cache.iter().position(|(cl, _)| *cl == l) {
            Some(i) => i,
            None => {
                let w = mu.times.weights(0.0, l, true)?;
                let mut m = vec![0.0; len];
                for (x, mx) in m.iter_mut().enumerate() {
                    let mut k = KahanSum::new();
                    for (i, wi) in w.iter().enumerate() {
                        if *wi != 0.0 {
                            k.add(wi * mu.values[i * len + x]);
                        }
                    }
                    *mx = k.value();
                }
                cache.push((l, m));
                cache.len() - 1
            }
        };
        let m = &cache[pos].1;
        let mut k = KahanSum::new();
        for (idx, _) in c.samples(&g) {
            k.add(m[idx]);
        }
        vals.push(k.value() * vol / l.powf(g.dim as f64 * p_exp));
    }
    let (i, v) = arg_max(&vals);
    Ok(NormReport::new(
        "p-Carleson",
        v,
        Witness::cube(&g, i, cubes.cubes[i]),
        ReportParams { alpha: None, beta: None, horizon: None, grid: g },
        time_quadrature(g, &mu.times),
    )
    .note(format!("p = {p_exp}; density piecewise constant on time cells")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::synth::random_field;

    fn setup() -> (TorusGrid, FracParams, BallFamily) {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        (g, FracParams::new(0.3, 0.8).unwrap(), BallFamily::standard(g).unwrap())
    }

    #[test]
    fn ball_sums_match_direct_scan() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64).collect();
        let r = 3.0 * g.spacing();
        let s = ball_sums(&g, &vals, r).unwrap();
        for x in [0usize, 17, 200] {
            let direct: f64 = (0..g.len())
                .filter(|&y| (g.periodic_index_dist2(x, y) as f64) * g.spacing().powi(2) < r * r)
                .map(|y| vals[y])
                .sum();
            assert!((s[x] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_field_and_doubling_horizon() {
        let (g, p, balls) = setup();
        let times = carleson_time_grid(&balls, p.beta).unwrap();
        let z = SpectralField::zeros(g, 1);
        let r = carleson_q_inverse_norm(&z, &p, f64::INFINITY, &balls, &times, RadiusRange::PowerBeta).unwrap();
        assert_eq!(r.value, 0.0);
        let f = random_field(g, 1, 3, 1.0, 5, false);
        let t_small = 0.125f64.powf(2.0 * p.beta) * 1.01;
        let a = carleson_q_inverse_norm(&f, &p, t_small, &balls, &times, RadiusRange::PowerBeta).unwrap();
        let b = carleson_q_inverse_norm(&f, &p, 2.0 * t_small, &balls, &times, RadiusRange::PowerBeta).unwrap();
        let c = carleson_q_inverse_norm(&f, &p, 1.0, &balls, &times, RadiusRange::PowerBeta).unwrap();
        assert!(a.value <= b.value && b.value <= c.value);
        assert!(carleson_q_inverse_norm(&f, &p, 1e-9, &balls, &times, RadiusRange::PowerBeta).is_err());
    }

    #[test]
    fn heat_gradient_window_is_admissible() {
        let w = HeatGradientWindow { beta: 0.8 };
        for dim in 1..=3 {
            assert!(check_window(&w, dim).admissible);
        }
        struct Flat;
        impl Window for Flat {
            fn channels(&self, _: usize) -> usize {
                1
            }
            fn symbol(&self, _: usize, xi: [f64; 3]) -> Complex64 {
                Complex64::new((-(xi[0] * xi[0])).exp(), 0.0)
            }
            fn name(&self) -> String {
                "gaussian".into()
            }
        }
        assert!(!check_window(&Flat, 1).admissible);
    }

    #[test]
    fn nk_guard_and_zero_field() {
        let (g, p, balls) = setup();
        let times = TimeGrid::geometric(1.0, 2.0, 8).unwrap();
        let z = vec![SpectralField::zeros(g, 2); times.len()];
        let (a, b) = nk_norms(&z, &times, &p, 1, 1.0, &balls, RadiusRange::PowerBeta).unwrap();
        assert_eq!((a.value, b.value), (0.0, 0.0));
        assert!(nk_norms(&z, &times, &p, 20, 1.0, &balls, RadiusRange::PowerBeta).is_err());
    }

    #[test]
    fn p_carleson_rejects_negative_density() {
        let g = TorusGrid::new(1, 32, 1.0).unwrap();
        let times = TimeGrid::geometric(1.0, 2.0, 8).unwrap();
        let mut mu = HalfSpaceSample::zeros(times, g, 1);
        mu.values[3] = -1.0;
        let fam = CubeFamily::dyadic(g).unwrap();
        assert!(p_carleson_norm(&mu, 0.5, &fam).is_err());
    }
}
