use super::{max_of, CheckOutcome, Series, SuiteOutput};
use crate::error::Result;
use kernels::{decay_envelope_check, heat_kernel_profile, oseen_kernel_profile, oseen_parts};
use std::f64::consts::PI;

fn uniform(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
}

pub(super) fn fidelity() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();

    // beta = 1 against the closed-form Gaussian, errors in units of the peak.
    let radii = uniform(0.0, 10.0, 100);
    let mut gauss: f64 = 0.0;
    for n in 1..=3 {
        for t in [0.5, 1.0, 2.0] {
            let p = heat_kernel_profile(n, 1.0, t, &radii)?;
            let peak = (4.0 * PI * t).powf(-(n as f64) / 2.0);
            for (r, v) in radii.iter().zip(&p.values) {
                gauss = gauss.max((v - peak * (-r * r / (4.0 * t)).exp()).abs() / peak);
            }
        }
    }
    out.push(CheckOutcome::at_most("gaussian_limit", gauss, 1e-8, "n = 1..3, t in {0.5, 1, 2}, r in [0, 10]"));

    // K_t(r) = t^{-n/2beta} K_1(r t^{-1/2beta}) for heat and Oseen kernels.
    let radii = uniform(0.0, 8.0, 40);
    let (mut heat, mut oseen): (f64, f64) = (0.0, 0.0);
    for n in 1..=3 {
        for &(beta, t) in &[(0.75f64, 0.3f64), (0.6, 2.5), (0.9, 1.7)] {
            let s = t.powf(0.5 / beta);
            let scaled: Vec<f64> = radii.iter().map(|r| r / s).collect();
            let amp = t.powf(-(n as f64) / (2.0 * beta));
            let kt = heat_kernel_profile(n, beta, t, &radii)?;
            let k1 = heat_kernel_profile(n, beta, 1.0, &scaled)?;
            let peak = kt.peak();
            heat = heat.max(max_of(kt.values.iter().zip(&k1.values).map(|(a, b)| (a - amp * b).abs() / peak)));
            let ot = oseen_kernel_profile(n, beta, t, 0, 0, 0, &radii)?;
            let o1 = oseen_kernel_profile(n, beta, 1.0, 0, 0, 0, &scaled)?;
            let peak = ot.peak();
            oseen = oseen.max(max_of(ot.values.iter().zip(&o1.values).map(|(a, b)| (a - amp * b).abs() / peak)));
        }
    }
    out.push(CheckOutcome::at_most("heat_self_similarity", heat, 1e-9, "relative to the peak, r in [0, 8]"));
    out.push(CheckOutcome::at_most("oseen_self_similarity", oseen, 1e-9, "component (0, 0), relative to the peak"));

    let radii = uniform(0.0, 12.0, 48);
    let mut trace: f64 = 0.0;
    for n in 1..=3 {
        for beta in [0.6, 0.75, 1.0] {
            let parts = oseen_parts(n, beta, 0.7, &radii)?;
            let heat = heat_kernel_profile(n, beta, 0.7, &radii)?;
            trace = trace.max(max_of((0..radii.len()).map(|i| (parts.trace(i) - heat.values[i]).abs())));
        }
    }
    out.push(CheckOutcome::at_most("oseen_trace", trace, 1e-9, "max |sum_i O_ii - K|, n = 1..3, t = 0.7"));
    Ok(out)
}

pub(super) fn decay() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let radii = kernels::decay::default_radii();
    for beta in [0.6, 0.75, 0.9] {
        let rep = decay_envelope_check(6, beta, &radii)?;
        let finite = rep.m.iter().all(|m| m.is_finite() && *m > 0.0);
        let roots: Vec<String> = rep.roots.iter().map(|r| format!("{r:.4}")).collect();
        out.push(CheckOutcome::below(
            &format!("root_spread_beta_{beta}"),
            if finite { rep.root_spread } else { f64::INFINITY },
            10.0,
            format!("M_k^(1/k), k = 1..6: [{}]", roots.join(", ")),
        ));
        let ks: Vec<f64> = (1..=rep.roots.len()).map(|k| k as f64).collect();
        out.series.push(Series::new(format!("beta = {beta}"), "k", "M_k^(1/k)", ks, rep.roots.clone()));
    }
    Ok(out)
}
