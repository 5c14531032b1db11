use super::{max_of, min_of, CheckOutcome, Series, SuiteOutput};
use crate::error::Result;
use qnorms::carleson::{carleson_time_grid, wavelet_time_grid, CarlesonSetup, HeatGradientWindow, RadiusRange};
use qnorms::checks::{embedding_check, EmbeddingContext, EmbeddingPair};
use qnorms::qspace::cube_energies;
use qnorms::{
    bmo_beta_norm, carleson_q_inverse_norm, q_norm, q_norm_samples, wavelet_carleson_norm, BallFamily, CubeFamily,
    Samples,
};
use spectral_core::ops::partial_derivative;
use spectral_core::synth::random_field;
use spectral_core::{refine, scaling_transform, FracParams, SpectralField, TorusGrid};

fn params() -> FracParams {
    FracParams::new(0.3, 0.8).expect("admissible parameters")
}

/// `sqrt(max_I l^{2(a+b-1)-1} sum_{i != j in I} |f_i - f_j|^2 / d^{1+2(a-b+1)} h^2)` on a line.
fn brute_force_q(samples: &[f64], fam: &CubeFamily, p: &FracParams) -> f64 {
    let n = samples.len();
    let h = fam.grid.spacing();
    let e = 1.0 + 2.0 * (p.alpha - p.beta + 1.0);
    let mut best: f64 = 0.0;
    for c in &fam.cubes {
        let idx: Vec<usize> = (0..c.side).map(|k| (c.start[0] + k) % n).collect();
        let mut u = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                if a != b {
                    let d = (a as f64 - b as f64).abs() * h;
                    u += (samples[i] - samples[j]).powi(2) / d.powf(e) * h * h;
                }
            }
        }
        let l = c.side as f64 * h;
        best = best.max(l.powf(2.0 * (p.alpha + p.beta - 1.0) - 1.0) * u);
    }
    best.sqrt()
}

pub(super) fn oracle() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let p = params();

    let g1 = TorusGrid::new(1, 32, 1.0)?;
    let fam1 = CubeFamily::dyadic(g1)?;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let f = random_field(g1, 1, 400 + seed, 1.0, 8, false);
        let want = brute_force_q(&f.to_samples(), &fam1, &p);
        let got = q_norm(&f, &p, &fam1)?.value;
        worst = worst.max((got - want).abs() / want);
    }
    out.push(CheckOutcome::at_most("double_sum_oracle", worst, 1e-10, "n = 1, N = 32, 10 fields, all family cubes"));

    let g = TorusGrid::new(2, 32, 1.0)?;
    let fam = CubeFamily::dyadic(g)?;
    let mut moved_diff: f64 = 0.0;
    for (seed, shift) in [(4u64, [5i64, -3, 0]), (5, [16, 16, 0]), (6, [-1, 11, 0])] {
        let s = random_field(g, 1, seed, 1.0, 6, false).to_samples();
        let moved: Vec<f64> = (0..g.len())
            .map(|i| {
                let c = g.coords(i);
                s[g.flat_wrapped(&[c[0] as i64 - shift[0], c[1] as i64 - shift[1], 0])]
            })
            .collect();
        let a = q_norm_samples(&Samples::new(g, 1, &s)?, &p, &fam)?.value;
        let b = q_norm_samples(&Samples::new(g, 1, &moved)?, &p, &fam.shifted(shift))?.value;
        moved_diff = moved_diff.max((a - b).abs());
    }
    out.push(CheckOutcome::new(
        "translation_invariance",
        moved_diff,
        super::Relation::Equal,
        0.0,
        "|Q(f) - Q(f(. - s))| with the family shifted by s, 3 shifts",
    ));

    let setup = CarlesonSetup::standard(g, p.beta)?;
    let w = HeatGradientWindow { beta: p.beta };
    let wt = wavelet_time_grid(&setup.balls)?;
    let mut homog: f64 = 0.0;
    for (seed, c) in [(8u64, -2.75), (9, 0.125), (10, 13.0)] {
        let f = random_field(g, 1, seed, 1.0, 5, false);
        let fc = f.scale(c);
        let pairs = [
            (q_norm(&fc, &p, &fam)?.value, q_norm(&f, &p, &fam)?.value),
            (bmo_beta_norm(&fc, p.beta, &fam)?.value, bmo_beta_norm(&f, p.beta, &fam)?.value),
            (setup.q_inverse(&fc, &p)?.value, setup.q_inverse(&f, &p)?.value),
            (
                wavelet_carleson_norm(&fc, &w, &p, &setup.balls, &wt)?.value,
                wavelet_carleson_norm(&f, &w, &p, &setup.balls, &wt)?.value,
            ),
        ];
        for (a, b) in pairs {
            homog = homog.max((a - c.abs() * b).abs() / a.abs().max(c.abs() * b));
        }
    }
    out.push(CheckOutcome::at_most("absolute_homogeneity", homog, 1e-12, "Q, BMO, semigroup and wavelet Carleson norms"));
    Ok(out)
}

/// `|Q(f_lambda; F) / Q(f; 2F) - 1|` for 20 fields, with `f_lambda = lambda^gamma f(lambda .)`.
fn scaling_deviations(g: TorusGrid, seed0: u64) -> Result<Vec<f64>> {
    let p = params();
    let fam = CubeFamily::dyadic(g)?;
    let image = fam.dilated(2)?;
    (0..20)
        .map(|s| {
            let f = random_field(g, 1, seed0 + s, 1.0, 3, false);
            let fl = scaling_transform(&f, 2.0, 2.0 * p.beta - 2.0)?;
            let a = q_norm(&fl, &p, &fam)?.value;
            let b = q_norm(&f, &p, &image)?.value;
            Ok((a / b - 1.0).abs())
        })
        .collect()
}

pub(super) fn scaling() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (g, seed0) in [(TorusGrid::new(1, 256, 1.0)?, 300), (TorusGrid::new(2, 128, 1.0)?, 320)] {
        let dev = scaling_deviations(g, seed0)?;
        let label = format!("n{}_N{}", g.dim, g.n());
        let bad = dev.iter().filter(|&&d| !(d < 0.03)).count();
        out.push(CheckOutcome::none(
            &format!("violations_{label}"),
            bad,
            format!("lambda = 2, gamma = 2 beta - 2, 20 fields, worst change {:.3}%", 100.0 * max_of(dev.iter().copied())),
        ));
    }
    Ok(out)
}

pub(super) fn monotonicity() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let g = TorusGrid::new(2, 32, 1.0)?;
    let fam = CubeFamily::dyadic(g)?;
    let triples = [(0.1, 0.5, 0.8), (0.0, 0.3, 0.95), (0.2, 0.25, 0.8), (0.0, 0.7, 0.75)];
    let mut violations = 0;
    let mut checked = 0;
    let mut tightest: f64 = 0.0;
    for seed in 0..100 {
        let v = random_field(g, 1, 1000 + seed, 1.0, 8, false).to_samples();
        let s = Samples::new(g, 1, &v)?;
        for &(a1, a2, beta) in &triples {
            // (sqrt n)^{2(a2 - a1)} with n = 2.
            let factor = 2f64.powf(a2 - a1);
            let lo = cube_energies(&s, a1, beta, &fam)?;
            let hi = cube_energies(&s, a2, beta, &fam)?;
            for (x, y) in lo.iter().zip(&hi) {
                checked += 1;
                if *x > factor * y * (1.0 + 1e-13) {
                    violations += 1;
                }
                if *y > 0.0 {
                    tightest = tightest.max(x / (factor * y));
                }
            }
        }
    }
    out.push(CheckOutcome::none(
        "violations",
        violations,
        format!("{checked} cube inequalities over 100 fields and 4 (alpha1, alpha2, beta); largest lhs/rhs {tightest:.4}"),
    ));
    Ok(out)
}

/// Grids, families and norms of the frozen 20-field family at `pts` points per axis.
struct Level {
    cubes: CubeFamily,
    setup: CarlesonSetup,
    fields: Vec<SpectralField>,
}

fn level(pts: usize) -> Result<Level> {
    let p = params();
    let g0 = TorusGrid::new(2, 32, 1.0)?;
    let factor = pts / 32;
    let cubes = CubeFamily::dyadic(g0)?.refined(factor)?;
    let balls: BallFamily = BallFamily::standard(g0)?.refined(factor)?;
    let times = carleson_time_grid(&balls, p.beta)?;
    let setup = CarlesonSetup { horizon: f64::INFINITY, balls, times, range: RadiusRange::PowerBeta };
    let fields = (0..20).map(|s| Ok(refine(&random_field(g0, 1, 700 + s, 1.0, 6, false), factor)?)).collect::<Result<_>>()?;
    Ok(Level { cubes, setup, fields })
}

/// Per field: (wavelet^2 / Q^2, heat-gradient Carleson^2 / Q^2).
fn characterization_ratios(lv: &Level) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = params();
    let w = HeatGradientWindow { beta: p.beta };
    let wt = wavelet_time_grid(&lv.setup.balls)?;
    let (mut wav, mut heat) = (Vec::new(), Vec::new());
    for f in &lv.fields {
        let q2 = q_norm(f, &p, &lv.cubes)?.value.powi(2);
        wav.push(wavelet_carleson_norm(f, &w, &p, &lv.setup.balls, &wt)?.value.powi(2) / q2);
        let grad = SpectralField::stack(&[partial_derivative(f, 0)?, partial_derivative(f, 1)?])?;
        let c = carleson_q_inverse_norm(&grad, &p, f64::INFINITY, &lv.setup.balls, &lv.setup.times, RadiusRange::PowerBeta)?;
        heat.push(c.value.powi(2) / q2);
    }
    Ok((wav, heat))
}

fn bracket(v: &[f64]) -> (f64, f64) {
    (min_of(v.iter().copied()), max_of(v.iter().copied()))
}

fn bracket_shift(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((b.0 / a.0 - 1.0).abs()).max((b.1 / a.1 - 1.0).abs())
}

pub(super) fn characterization() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let (coarse, fine) = (level(32)?, level(64)?);
    let (wc, hc) = characterization_ratios(&coarse)?;
    let (wf, hf) = characterization_ratios(&fine)?;
    for (name, c, f) in [("wavelet", &wc, &wf), ("heat_gradient", &hc, &hf)] {
        let (bc, bf) = (bracket(c), bracket(f));
        out.push(CheckOutcome::below(
            &format!("{name}_log_spread"),
            (bc.1 / bc.0).ln(),
            30f64.ln(),
            format!("ratio to Q^2 in [{:.4}, {:.4}] over 20 fields at N = 32", bc.0, bc.1),
        ));
        out.push(CheckOutcome::below(
            &format!("{name}_refinement_shift"),
            bracket_shift(bc, bf),
            0.2,
            format!("bracket [{:.4}, {:.4}] at N = 64", bf.0, bf.1),
        ));
        let idx: Vec<f64> = (0..c.len()).map(|i| i as f64).collect();
        out.series.push(Series::new(format!("{name} N=32"), "field", "ratio to Q^2", idx.clone(), c.clone()));
        out.series.push(Series::new(format!("{name} N=64"), "field", "ratio to Q^2", idx, f.clone()));
    }
    Ok(out)
}

pub(super) fn embeddings() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let p = params();
    let (coarse, fine) = (level(32)?, level(64)?);
    let pairs = [
        ("besov_into_q", EmbeddingPair::BesovIntoQ { q: 2.0 }),
        ("besov_into_q_inverse", EmbeddingPair::BesovIntoQInverse { p: 4.0, q: 2.0 }),
        ("q_inverse_into_besov", EmbeddingPair::QInverseIntoBesov),
    ];
    for (name, pair) in pairs {
        let mut max = [0.0f64; 2];
        let mut finite = true;
        for (k, lv) in [&coarse, &fine].into_iter().enumerate() {
            let ctx = EmbeddingContext { cubes: &lv.cubes, setup: &lv.setup };
            for f in &lv.fields {
                match embedding_check(f, &p, pair, &ctx)?.ratio {
                    Some(r) if r.is_finite() => max[k] = max[k].max(r),
                    _ => finite = false,
                }
            }
        }
        out.push(CheckOutcome::none(
            &format!("{name}_nonfinite"),
            usize::from(!finite),
            format!("uniform bound {:.4} at N = 32, {:.4} at N = 64", max[0], max[1]),
        ));
        out.push(CheckOutcome::below(
            &format!("{name}_refinement_shift"),
            (max[1] / max[0] - 1.0).abs(),
            0.1,
            "relative change of the uniform ratio bound under one refinement",
        ));
    }
    Ok(out)
}
