use kernels::profile::{periodized_heat_kernel_1d, tail_coefficients};
use kernels::{
    decay_envelope_check, heat_kernel_profile, oseen_kernel_profile, oseen_parts, projected_gradient_profile,
    total_mass,
};
use spectral_core::synth::random_field;
use spectral_core::{heat_semigroup, TorusGrid};
use std::f64::consts::PI;

fn uniform(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
}

fn geometric(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a * (b / a).powf(i as f64 / k as f64)).collect()
}

#[test]
fn gaussian_limit_in_all_dimensions() {
    let radii = uniform(0.0, 10.0, 100);
    for n in 1..=3 {
        for t in [0.5, 1.0, 2.0] {
            let p = heat_kernel_profile(n, 1.0, t, &radii).unwrap();
            let peak = (4.0 * PI * t).powf(-(n as f64) / 2.0);
            for (r, v) in radii.iter().zip(&p.values) {
                let g = peak * (-r * r / (4.0 * t)).exp();
                assert!((v - g).abs() <= 1e-8 * peak, "n={n} t={t} r={r}: {v} vs {g}");
            }
        }
    }
}

#[test]
fn self_similarity_of_heat_and_oseen() {
    let radii = uniform(0.0, 8.0, 40);
    for n in 1..=3 {
        for &(beta, t) in &[(0.75f64, 0.3f64), (0.6, 2.5)] {
            let s = t.powf(0.5 / beta);
            let scaled: Vec<f64> = radii.iter().map(|r| r / s).collect();
            let amp = t.powf(-(n as f64) / (2.0 * beta));
            let kt = heat_kernel_profile(n, beta, t, &radii).unwrap();
            let k1 = heat_kernel_profile(n, beta, 1.0, &scaled).unwrap();
            let peak = kt.peak();
            for i in 0..radii.len() {
                assert!((kt.values[i] - amp * k1.values[i]).abs() <= 1e-9 * peak, "heat n={n} i={i}");
            }
            let ot = oseen_kernel_profile(n, beta, t, 0, 0, 0, &radii).unwrap();
            let o1 = oseen_kernel_profile(n, beta, 1.0, 0, 0, 0, &scaled).unwrap();
            let peak = ot.peak();
            for i in 0..radii.len() {
                assert!((ot.values[i] - amp * o1.values[i]).abs() <= 1e-9 * peak, "oseen n={n} i={i}");
            }
        }
    }
}

#[test]
fn oseen_trace_is_heat_kernel() {
    let radii = uniform(0.0, 12.0, 48);
    for n in 1..=3 {
        for beta in [0.6, 0.75, 1.0] {
            let parts = oseen_parts(n, beta, 0.7, &radii).unwrap();
            let heat = heat_kernel_profile(n, beta, 0.7, &radii).unwrap();
            for i in 0..radii.len() {
                assert!((parts.trace(i) - heat.values[i]).abs() <= 1e-9, "n={n} beta={beta} r={}", radii[i]);
            }
        }
    }
}

#[test]
fn oseen_gradient_decay_slope() {
    // At t = 1 the far-field regime starts near r = 8; the slope bound is checked there,
    // and on all of [2, 20] for a short-time kernel whose r / t^{1/2beta} is already large.
    let radii = geometric(2.0, 20.0, 24);
    let p = oseen_kernel_profile(2, 0.75, 1.0, 0, 1, 1, &radii).unwrap();
    let slopes = p.log_slopes();
    for (i, s) in slopes.iter().enumerate() {
        if radii[i] >= 8.0 {
            assert!(*s <= -(2.0 + 1.0) + 0.2, "t=1 r={}: slope {s}", radii[i]);
        }
    }
    assert!(slopes.windows(2).all(|w| w[1] <= w[0] + 1e-6), "slopes steepen monotonically");
    let p = oseen_kernel_profile(2, 0.75, 0.05, 0, 1, 1, &radii).unwrap();
    for s in p.log_slopes() {
        assert!(s <= -(2.0 + 1.0) + 0.2, "t=0.05: slope {s}");
    }
}

#[test]
fn heat_envelope_bounded_by_inverse_power() {
    let radii = uniform(0.0, 30.0, 60);
    for n in 1..=3 {
        for beta in [0.55, 0.75, 0.9] {
            let p = heat_kernel_profile(n, beta, 1.0, &radii).unwrap();
            let c = radii
                .iter()
                .zip(&p.values)
                .map(|(r, v)| v.abs() * (1.0 + r).powi(n as i32 + 1))
                .fold(0.0, f64::max);
            assert!(c.is_finite() && c < 10.0, "n={n} beta={beta}: {c}");
        }
    }
}

#[test]
fn large_radius_expansion_matches_quadrature() {
    for n in 1..=3 {
        for beta in [0.6, 0.75, 0.9] {
            let r = 25.0;
            let v = heat_kernel_profile(n, beta, 1.0, &[r]).unwrap().values[0];
            let series: f64 = tail_coefficients(n, beta, 1.0, 8)
                .iter()
                .enumerate()
                .map(|(k, c)| c * r.powf(-(n as f64) - 2.0 * beta * (k + 1) as f64))
                .sum();
            assert!((v - series).abs() <= 1e-6 * series.abs(), "n={n} beta={beta}: {v} vs {series}");
        }
    }
}

#[test]
fn unit_mass() {
    for n in 1..=3 {
        for beta in [0.75, 1.0] {
            let (m, _) = total_mass(n, beta, 1.0, 30.0, 60).unwrap();
            assert!((m - 1.0).abs() < 1e-8, "n={n} beta={beta}: {m}");
        }
    }
}

/// Closed-form `P grad K` for the Gaussian in the plane, Frobenius norm on the first axis.
fn gaussian_projected_gradient(t: f64, r: f64) -> f64 {
    let s = r * r / (4.0 * t);
    let e = (-s).exp();
    let one_minus_e = -(-s).exp_m1();
    let tp = 2.0 * PI;
    // Phi is the radial inverse Laplacian of the Gaussian; g = Phi'.
    let g = -one_minus_e / (tp * r);
    let g1 = (one_minus_e / (r * r) - e / (2.0 * t)) / tp;
    let g2 = (e / (2.0 * t * r) - 2.0 * one_minus_e / (r * r * r) + r * e / (4.0 * t * t)) / tp;
    let xh = [1.0, 0.0];
    let gauss = e / (4.0 * PI * t);
    let dg = -r / (2.0 * t) * gauss;
    let c3 = g2 - 3.0 * g1 / r + 3.0 * g / (r * r);
    let c1 = g1 / r - g / (r * r);
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut sq = 0.0;
    for j in 0..2 {
        for l in 0..2 {
            for m in 0..2 {
                let third = c3 * xh[j] * xh[l] * xh[m] + c1 * (d(j, l) * xh[m] + d(j, m) * xh[l] + d(l, m) * xh[j]);
                // d_m O_jl = -d_m d_j d_l Phi.
                let v = d(j, l) * dg * xh[m] + third;
                sq += v * v;
            }
        }
    }
    sq.sqrt()
}

#[test]
fn gaussian_oseen_envelope_oracle() {
    let radii = uniform(0.3, 9.0, 30);
    let t = 1.0;
    let p = projected_gradient_profile(1.0, t, 0, &radii).unwrap();
    let peak = p.peak();
    let mut env: f64 = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        let want = gaussian_projected_gradient(t, r);
        assert!((p.values[i] - want).abs() <= 1e-8 * peak, "r={r}: {} vs {want}", p.values[i]);
        env = env.max(want * (1.0 + r).powi(3));
    }
    assert!(env.is_finite());
    let rep = decay_envelope_check(0, 1.0, &radii).unwrap();
    assert!((rep.m[0] - env).abs() <= 1e-7 * env);
}

#[test]
fn decay_envelope_roots_are_bounded() {
    let radii = kernels::decay::default_radii();
    for beta in [0.6, 0.75, 0.9] {
        let rep = decay_envelope_check(6, beta, &radii).unwrap();
        assert!(rep.m.iter().all(|m| m.is_finite() && *m > 0.0));
        assert!(rep.root_spread < 10.0, "beta={beta}: {:?}", rep.roots);
    }
    assert!(decay_envelope_check(7, 0.75, &radii).is_err());
}

#[test]
fn periodized_kernel_reproduces_semigroup() {
    let g = TorusGrid::new(1, 128, 2.0 * PI).unwrap();
    let f = random_field(g, 1, 17, 1.0, 20, false);
    let fs = f.to_samples();
    let h = g.spacing();
    let xs: Vec<f64> = (0..g.len()).map(|i| i as f64 * h).collect();
    for beta in [1.0, 0.75] {
        for t in [0.05, 0.4] {
            let kp = periodized_heat_kernel_1d(beta, t, g.period, &xs, 4).unwrap();
            let want = heat_semigroup(&f, t, beta).unwrap().to_samples();
            let scale = fs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..g.len() {
                let mut acc = 0.0;
                for j in 0..g.len() {
                    acc += kp[(i + g.len() - j) % g.len()] * fs[j] * h;
                }
                assert!((acc - want[i]).abs() <= 1e-6 * scale, "beta={beta} t={t} i={i}: {acc} vs {}", want[i]);
            }
        }
    }
}
