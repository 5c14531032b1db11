use super::{max_of, CheckOutcome, Series, SuiteOutput};
use crate::error::{LabError, Result};
use kernels::quad::adaptive;
use solver::lemmas::lemma_balls;
use solver::picard::CONTRACTION_ITERATIONS;
use solver::*;
use spectral_core::synth::random_field;
use spectral_core::{Complex64, FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Data direction, solver grid and located threshold shared by the solver suites.
struct Reference {
    p: FracParams,
    a: SpectralField,
    times: TimeGrid,
    threshold: Threshold,
}

fn build_reference() -> Result<Reference> {
    let g = TorusGrid::new(2, 64, 2.0 * PI)?;
    let p = FracParams::new(0.3, 0.75)?;
    let a = random_field(g, 2, 7, 1.5, 4, true);
    let times = TimeGrid::geometric(1.0, 1.25, 32)?;
    let threshold = smallness_threshold(&a, &times, &p, 0.01)?;
    Ok(Reference { p, a, times, threshold })
}

fn reference() -> Result<&'static Reference> {
    static CELL: OnceLock<std::result::Result<Reference, String>> = OnceLock::new();
    CELL.get_or_init(|| build_reference().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| LabError::Usage(format!("reference solver setup failed: {e}")))
}

impl Reference {
    /// Data at `frac` of the located threshold.
    fn data(&self, frac: f64) -> SpectralField {
        self.a.scale(frac * self.threshold.data_scale)
    }
}

pub(super) fn contraction() -> Result<SuiteOutput> {
    let r = reference()?;
    let mut out = SuiteOutput::default();
    let th = &r.threshold;
    let cfg = PicardConfig { j_max: CONTRACTION_ITERATIONS + 1, tol: 0.0, abort_ratio: None };
    let s = picard_solve(&r.data(1e-3), &r.times, &r.p, &cfg)?;
    let ratios: Vec<f64> = s.ratios.iter().take(CONTRACTION_ITERATIONS).copied().collect();
    let worst = if ratios.len() == CONTRACTION_ITERATIONS { max_of(ratios.iter().copied()) } else { f64::INFINITY };
    out.push(CheckOutcome::at_most(
        "contraction_ratio",
        worst,
        0.67,
        format!(
            "threshold amplitude {:.4} (bracket {:.4}, {} probes); ratios at 1e-3 of it: {}",
            th.amplitude,
            th.upper,
            th.probes.len(),
            ratios.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    ));
    let js: Vec<f64> = (1..=ratios.len()).map(|j| j as f64).collect();
    out.series.push(Series::new("1e-3 of threshold", "iteration j", "increment ratio", js, ratios));
    Ok(out)
}

pub(super) fn residuals() -> Result<SuiteOutput> {
    let r = reference()?;
    let mut out = SuiteOutput::default();
    // The residual's time derivative is second order in ln q; the solve uses q^(1/4).
    let fine = TimeGrid::geometric(1.0, 1.25f64.powf(0.25), 125)?;
    let a = r.data(0.1);
    let s = picard_solve(&a, &fine, &r.p, &PicardConfig::default())?;
    let nonlinear = residual(&s.u, &r.p, true)?;
    out.push(CheckOutcome::at_most(
        "solution_residual",
        if s.converged { nonlinear.max_relative } else { f64::INFINITY },
        1e-4,
        format!("0.1 of threshold, {} nodes, {} iterations, converged {}", fine.len(), s.iterations, s.converged),
    ));
    let lin = residual(&Trajectory::linear(&a, fine.clone(), r.p.beta)?, &r.p, false)?;
    out.push(CheckOutcome::at_most("linear_residual", lin.max_relative, 1e-10, "exp(-t Lambda) a on the same grid"));
    out.series.push(Series::new("solution", "t", "relative residual", nonlinear.times.clone(), nonlinear.relative.clone()));
    Ok(out)
}

pub(super) fn covariance() -> Result<SuiteOutput> {
    let r = reference()?;
    let mut out = SuiteOutput::default();
    let rep = scaling_covariance(&r.data(0.1), &r.times, &r.p, 2.0, &PicardConfig::default())?;
    out.push(CheckOutcome::below(
        "scaling_covariance",
        rep.max_relative,
        0.01,
        format!("lambda = 2, {} matched nodes, 0.1 of threshold", rep.relative.len()),
    ));
    out.series.push(Series::new("lambda = 2", "t", "relative mismatch", rep.times.clone(), rep.relative.clone()));
    Ok(out)
}

pub(super) fn regularity() -> Result<SuiteOutput> {
    let r = reference()?;
    let mut out = SuiteOutput::default();
    let cfg = PicardConfig::default();
    let a = r.data(0.1);
    let coarse = linear_part_regularity(&a, &r.times, &r.p, 2, &cfg)?;
    let fine = linear_part_regularity(&a, &r.times.refined()?, &r.p, 2, &cfg)?;
    let finite = coarse.all_finite() && fine.all_finite() && coarse.rows.len() == 3;
    out.push(CheckOutcome::none(
        "nonfinite_tables",
        usize::from(!coarse.all_finite()) + usize::from(!fine.all_finite()),
        format!("k = 0, 1, 2; regime {:?}, {} iterations", coarse.regime, coarse.picard_iterations),
    ));
    out.push(CheckOutcome::below(
        "refinement_shift",
        if finite { coarse.max_relative_shift(&fine) } else { f64::INFINITY },
        0.15,
        "largest relative change of any table entry under time-grid refinement",
    ));
    Ok(out)
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    adaptive(&mut g, a, b, 1, 1e-15, 100_000).map_or(f64::NAN, |(v, _)| v[0])
}

/// `int_0^T g(t) t^{-a} dt` after `t = T e^{-u}`.
fn weighted<F: Fn(f64) -> f64>(g: F, a: f64, horizon: f64) -> f64 {
    integrate(
        |u| {
            let t = horizon * (-u).exp();
            g(t) * t.powf(1.0 - a)
        },
        0.0,
        60.0,
    )
}

fn cosine_mode(g: TorusGrid, k: i64) -> SpectralField {
    let mut f = SpectralField::zeros(g, 1);
    let i = g.index_of_wavenumber(k);
    f.coeffs[i] = Complex64::new(0.5, 0.0);
    f.coeffs[g.mirror(i)] = Complex64::new(0.5, 0.0);
    f
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Single-mode agreement of the three estimates with scalar quadrature.
fn lemma_oracles(out: &mut SuiteOutput, p: &FracParams) -> Result<()> {
    let g = TorusGrid::new(1, 16, 2.0 * PI)?;
    let t = lemma_time_grid(&[], 1.0, 8, 1.0)?;
    let a = p.alpha / p.beta;
    let norm = weighted(|_| 1.0, a, 1.0);

    let mut mr: f64 = 0.0;
    for k in [1, 3, 6] {
        let got = maximal_regularity_check(&vec![cosine_mode(g, k); t.len()], &t, p)?.ratio;
        let lam = (k as f64).powf(2.0 * p.beta);
        mr = mr.max(rel(got, weighted(|s| (1.0 - (-lam * s).exp()).powi(2), a, 1.0) / norm));
    }
    out.push(CheckOutcome::at_most("maximal_regularity_oracle", mr, 1e-8, "modes 1, 3, 6"));

    let gam = 1.0 / (2.0 * p.beta);
    let mut pr: f64 = 0.0;
    for r in 0..=3usize {
        for k in [1, 4] {
            let got = pr_operator_check(&vec![cosine_mode(g, k); t.len()], &t, p, r)?.ratio;
            let rho = k as f64;
            let lam = rho.powf(2.0 * p.beta);
            let op = |tt: f64| {
                rho.powf(r as f64 + 2.0 * p.beta)
                    * integrate(|s| (-lam * (tt - s)).exp() * (tt.powf(gam) - s.powf(gam)).powi(r as i32), 0.0, tt)
            };
            pr = pr.max(rel(got, weighted(|s| op(s).powi(2), a, 1.0) / norm));
        }
    }
    out.push(CheckOutcome::at_most("pr_operator_oracle", pr, 1e-8, "r = 0..3, modes 1, 4"));

    let g = TorusGrid::new(1, 32, 2.0 * PI)?;
    let radii = [0.3, 0.6, 0.9];
    let balls = lemma_balls(g, &radii, p.beta, 1.0)?;
    let taus: Vec<f64> = radii.iter().map(|r: &f64| r.powf(2.0 * p.beta)).collect();
    let t = lemma_time_grid(&taus, 1.0, 8, 1.0)?;
    let m = 3;
    let n: Vec<f64> = (0..g.len()).map(|j| 1.0 + (m as f64 * g.position(j)[0]).cos()).collect();
    let sample = HalfSpaceSample::from_fn(t.clone(), g, |_, _, j, _| n[j]);
    // Brute-force Carleson functional of the time-constant density n.
    let h = g.spacing();
    let len = g.len() as i64;
    let mut carl: f64 = 0.0;
    for &r in &radii {
        let time = r.powf(2.0 * p.beta).powf(1.0 - a) / (1.0 - a);
        for &c in &balls.centers {
            let s: f64 = (-len..=len).filter(|d| (*d as f64).abs() * h < r).map(|d| n[(c as i64 + d).rem_euclid(len) as usize]).sum();
            carl = carl.max(r.powf(2.0 * p.alpha - 1.0 + 2.0 * p.beta - 2.0) * time * s * h);
        }
    }
    let mass = g.period / (1.0 - a);
    let mut le: f64 = 0.0;
    for k in 0..=2usize {
        let got = le5_inequality_check(&sample, p, k, &balls)?;
        let rho = m as f64;
        let lam = rho.powf(2.0 * p.beta);
        let lhs = g.period * 0.5 * rho.powf(2.0 * (k as f64 * p.beta + 1.0))
            * weighted(|s| s.powf(k as f64 + 2.0) * (-s * lam).exp(), a, 1.0);
        le = le.max(rel(got.ratio, lhs / (carl * mass)));
        le = le.max(got.carleson.map_or(f64::INFINITY, |c| rel(c, carl)));
    }
    out.push(CheckOutcome::at_most("smoothing_estimate_oracle", le, 1e-8, "k = 0, 1, 2, mode 3 over a constant"));
    Ok(())
}

/// Smooth, non-separable time dependence in `ln t` built from three random fields.
fn random_series(g: TorusGrid, t: &TimeGrid, seed: u64) -> Result<Vec<SpectralField>> {
    let f0 = random_field(g, 1, seed, 1.0, 6, false);
    let f1 = random_field(g, 1, seed + 1000, 1.0, 6, false);
    let f2 = random_field(g, 1, seed + 2000, 1.0, 6, false);
    t.nodes
        .iter()
        .map(|&s| {
            let c = (0.7 * s.ln() + seed as f64).cos();
            Ok(f0.add(&f1.scale(c))?.add(&f2.scale(s.powf(0.4)))?)
        })
        .collect()
}

/// Largest ratio over 20 series on both grids, and the largest refinement shift.
fn batch<F: Fn(&TimeGrid, u64) -> Result<f64>>(t: &TimeGrid, eval: F) -> Result<(f64, f64)> {
    let fine = t.refined()?;
    let (mut max_ratio, mut max_shift): (f64, f64) = (0.0, 0.0);
    for seed in 0..20 {
        let (a, b) = (eval(t, seed)?, eval(&fine, seed)?);
        if !(a.is_finite() && b.is_finite() && a > 0.0) {
            return Ok((f64::INFINITY, f64::INFINITY));
        }
        max_ratio = max_ratio.max(a).max(b);
        max_shift = max_shift.max((a - b).abs() / b);
    }
    Ok((max_ratio, max_shift))
}

fn lemma_batches(out: &mut SuiteOutput, p: &FracParams) -> Result<()> {
    let g = TorusGrid::new(2, 16, 2.0 * PI)?;
    let t = lemma_time_grid(&[], 1.0, 6, 1.0)?;
    let (max, shift) = batch(&t, |tg, seed| Ok(maximal_regularity_check(&random_series(g, tg, seed)?, tg, p)?.ratio))?;
    out.push(CheckOutcome::at_most("maximal_regularity_bound", max, 1.0 + 1e-6, "20 series, both grids"));
    out.push(CheckOutcome::below("maximal_regularity_shift", shift, 0.2, "relative change under refinement"));

    let mut bound: f64 = 0.0;
    let mut shifts: f64 = 0.0;
    for r in 0..=3 {
        let (max, shift) = batch(&t, |tg, seed| Ok(pr_operator_check(&random_series(g, tg, seed)?, tg, p, r)?.ratio))?;
        bound = bound.max(max);
        shifts = shifts.max(shift);
    }
    out.push(CheckOutcome::below("pr_operator_bound", bound, 1e3, "r = 0..3, 20 series"));
    out.push(CheckOutcome::below("pr_operator_shift", shifts, 0.2, "relative change under refinement"));

    let g = TorusGrid::new(2, 32, 2.0 * PI)?;
    let radii = [0.45, 0.9];
    let balls = lemma_balls(g, &radii, p.beta, 1.0)?;
    let taus: Vec<f64> = radii.iter().map(|r: &f64| r.powf(2.0 * p.beta)).collect();
    let t = lemma_time_grid(&taus, 1.0, 6, 1.0)?;
    let (mut bound, mut shifts): (f64, f64) = (0.0, 0.0);
    for k in 0..=2usize {
        let (max, shift) = batch(&t, |tg, seed| {
            let n = HalfSpaceSample::from_fields(tg.clone(), &random_series(g, tg, seed)?)?.magnitude();
            Ok(le5_inequality_check(&n, p, k, &balls)?.ratio)
        })?;
        bound = bound.max(max);
        shifts = shifts.max(shift);
    }
    out.push(CheckOutcome::below("smoothing_estimate_bound", bound, 1e3, "k = 0, 1, 2, 20 series"));
    out.push(CheckOutcome::below("smoothing_estimate_shift", shifts, 0.2, "relative change under refinement"));
    Ok(())
}

pub(super) fn lemmas() -> Result<SuiteOutput> {
    let p = FracParams::new(0.3, 0.75)?;
    let mut out = SuiteOutput::default();
    lemma_oracles(&mut out, &p)?;
    lemma_batches(&mut out, &p)?;
    Ok(out)
}
