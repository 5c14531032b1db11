use kernels::quad::adaptive;
use solver::lemmas::lemma_balls;
use solver::*;
use spectral_core::synth::random_field;
use spectral_core::{Complex64, FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use std::f64::consts::PI;

fn params() -> FracParams {
    FracParams::new(0.3, 0.75).unwrap()
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    adaptive(&mut g, a, b, 1, 1e-15, 100_000).expect("oracle quadrature converges").0[0]
}

/// `int_0^T g(t) t^{-a} dt` through `t = T e^{-u}`, which removes the endpoint singularity.
fn weighted<F: Fn(f64) -> f64>(g: F, a: f64, horizon: f64) -> f64 {
    integrate(|u| {
        let t = horizon * (-u).exp();
        g(t) * t.powf(1.0 - a)
    }, 0.0, 60.0)
}

fn cosine_mode(g: TorusGrid, k: i64) -> SpectralField {
    let mut f = SpectralField::zeros(g, 1);
    let i = g.index_of_wavenumber(k);
    f.coeffs[i] = Complex64::new(0.5, 0.0);
    f.coeffs[g.mirror(i)] = Complex64::new(0.5, 0.0);
    f
}

#[test]
fn maximal_regularity_single_mode_matches_scalar_oracle() {
    let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
    let p = params();
    let t = lemma_time_grid(&[], 1.0, 8, 1.0).unwrap();
    let a = p.alpha / p.beta;
    for k in [1, 3, 6] {
        let f = vec![cosine_mode(g, k); t.len()];
        let got = maximal_regularity_check(&f, &t, &p).unwrap();
        let lam = (k as f64).powf(2.0 * p.beta);
        let want = weighted(|s| (1.0 - (-lam * s).exp()).powi(2), a, 1.0) / weighted(|_| 1.0, a, 1.0);
        assert!((got.ratio - want).abs() < 1e-8 * want, "k={k}: {} vs {want}", got.ratio);
        assert!(got.ratio <= 1.0);
    }
}

#[test]
fn pr_operator_single_mode_matches_scalar_oracle() {
    let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
    let p = params();
    let t = lemma_time_grid(&[], 1.0, 8, 1.0).unwrap();
    let a = p.alpha / p.beta;
    let gam = 1.0 / (2.0 * p.beta);
    for r in 0..=3usize {
        for k in [1, 4] {
            let f = vec![cosine_mode(g, k); t.len()];
            let got = pr_operator_check(&f, &t, &p, r).unwrap();
            let rho = k as f64;
            let lam = rho.powf(2.0 * p.beta);
            let pr = |tt: f64| {
                rho.powf(r as f64 + 2.0 * p.beta)
                    * integrate(|s| (-lam * (tt - s)).exp() * (tt.powf(gam) - s.powf(gam)).powi(r as i32), 0.0, tt)
            };
            let want = weighted(|s| pr(s).powi(2), a, 1.0) / weighted(|_| 1.0, a, 1.0);
            assert!((got.ratio - want).abs() < 1e-8 * want, "r={r} k={k}: {} vs {want}", got.ratio);
        }
    }
}

/// Brute-force `sup r^s int_0^{r^{2 beta}} t^{-a} dt sum_{|y - x| < r} N(y) h` for time-constant `N`.
fn carleson_oracle(g: TorusGrid, n: &[f64], radii: &[f64], centers: &[usize], p: &FracParams) -> f64 {
    let a = p.alpha / p.beta;
    let h = g.spacing();
    let len = g.len() as i64;
    let mut best: f64 = 0.0;
    for &r in radii {
        let tau = r.powf(2.0 * p.beta);
        let time = tau.powf(1.0 - a) / (1.0 - a);
        for &c in centers {
            let mut s = 0.0;
            for d in -len..=len {
                if (d as f64).abs() * h < r {
                    s += n[(c as i64 + d).rem_euclid(len) as usize];
                }
            }
            best = best.max(r.powf(2.0 * p.alpha - 1.0 + 2.0 * p.beta - 2.0) * time * s * h);
        }
    }
    best
}

#[test]
fn smoothing_estimate_single_mode_matches_scalar_oracle() {
    let g = TorusGrid::new(1, 32, 2.0 * PI).unwrap();
    let p = params();
    let radii = [0.3, 0.6, 0.9];
    let balls = lemma_balls(g, &radii, p.beta, 1.0).unwrap();
    let taus: Vec<f64> = radii.iter().map(|r: &f64| r.powf(2.0 * p.beta)).collect();
    let t = lemma_time_grid(&taus, 1.0, 8, 1.0).unwrap();
    let a = p.alpha / p.beta;
    let m = 3;
    let n: Vec<f64> = (0..g.len()).map(|j| 1.0 + (m as f64 * g.position(j)[0]).cos()).collect();
    let sample = HalfSpaceSample::from_fn(t.clone(), g, |_, _, j, _| n[j]);
    let carl = carleson_oracle(g, &n, &radii, &balls.centers, &p);
    let mass = g.period / (1.0 - a);
    for k in 0..=2usize {
        let got = le5_inequality_check(&sample, &p, k, &balls).unwrap();
        let rho = m as f64;
        let lam = rho.powf(2.0 * p.beta);
        // Modes +-m carry 1/2 each; int_0^t N = t N.
        let lhs = g.period
            * 0.5
            * rho.powf(2.0 * (k as f64 * p.beta + 1.0))
            * weighted(|s| s.powf(k as f64 + 2.0) * (-s * lam).exp(), a, 1.0);
        let want = lhs / (carl * mass);
        assert!((got.carleson.unwrap() - carl).abs() < 1e-10 * carl);
        assert!((got.ratio - want).abs() < 1e-8 * want, "k={k}: {} vs {want}", got.ratio);
    }
}

/// Smooth, non-separable time dependence in `ln t` built from three random fields.
fn random_series(g: TorusGrid, t: &TimeGrid, seed: u64) -> Vec<SpectralField> {
    let f0 = random_field(g, 1, seed, 1.0, 6, false);
    let f1 = random_field(g, 1, seed + 1000, 1.0, 6, false);
    let f2 = random_field(g, 1, seed + 2000, 1.0, 6, false);
    t.nodes
        .iter()
        .map(|&s| {
            let c = (0.7 * s.ln() + seed as f64).cos();
            f0.add(&f1.scale(c)).unwrap().add(&f2.scale(s.powf(0.4))).unwrap()
        })
        .collect()
}

fn batch<F: Fn(&TimeGrid, u64) -> f64>(t: &TimeGrid, eval: F) -> (f64, f64) {
    let fine = t.refined().unwrap();
    let mut max_ratio: f64 = 0.0;
    let mut max_shift: f64 = 0.0;
    for seed in 0..20 {
        let (a, b) = (eval(t, seed), eval(&fine, seed));
        assert!(a.is_finite() && b.is_finite() && a > 0.0);
        max_ratio = max_ratio.max(a).max(b);
        max_shift = max_shift.max((a - b).abs() / b);
    }
    eprintln!("batch max ratio {max_ratio:.4e}, refinement shift {max_shift:.3e}");
    (max_ratio, max_shift)
}

#[test]
fn maximal_regularity_batch_is_bounded_and_refinement_stable() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let p = params();
    let t = lemma_time_grid(&[], 1.0, 6, 1.0).unwrap();
    let (max, shift) = batch(&t, |tg, seed| maximal_regularity_check(&random_series(g, tg, seed), tg, &p).unwrap().ratio);
    assert!(max <= 1.0 + 1e-6, "{max}");
    assert!(shift < 0.2, "{shift}");
}

#[test]
fn pr_operator_batch_is_bounded_and_refinement_stable() {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let p = params();
    let t = lemma_time_grid(&[], 1.0, 6, 1.0).unwrap();
    for r in 0..=3 {
        let (max, shift) = batch(&t, |tg, seed| pr_operator_check(&random_series(g, tg, seed), tg, &p, r).unwrap().ratio);
        assert!(max < 1e3, "r={r}: {max}");
        assert!(shift < 0.2, "r={r}: {shift}");
    }
}

#[test]
fn smoothing_estimate_batch_is_bounded_and_refinement_stable() {
    let g = TorusGrid::new(2, 32, 2.0 * PI).unwrap();
    let p = params();
    let radii = [0.45, 0.9];
    let balls = lemma_balls(g, &radii, p.beta, 1.0).unwrap();
    let taus: Vec<f64> = radii.iter().map(|r: &f64| r.powf(2.0 * p.beta)).collect();
    let t = lemma_time_grid(&taus, 1.0, 6, 1.0).unwrap();
    let mut fitted = Vec::new();
    for k in 0..=2usize {
        let (max, shift) = batch(&t, |tg, seed| {
            let fs = random_series(g, tg, seed);
            let n = HalfSpaceSample::from_fields(tg.clone(), &fs).unwrap().magnitude();
            le5_inequality_check(&n, &p, k, &balls).unwrap().ratio
        });
        assert!(shift < 0.2, "k={k}: {shift}");
        fitted.push(max);
    }
    assert!(fitted.iter().all(|b| b.is_finite() && *b < 1e3), "{fitted:?}");
}
