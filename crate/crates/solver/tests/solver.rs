use solver::flux::flux_divergence;
use solver::*;
use spectral_core::synth::random_field;
use spectral_core::{Complex64, FracParams, SpectralField, TimeGrid, TorusGrid};
use std::f64::consts::PI;

fn params() -> FracParams {
    FracParams::new(0.3, 0.75).unwrap()
}

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(2, n, 2.0 * PI).unwrap()
}

fn taylor_green(g: TorusGrid) -> SpectralField {
    let samples: Vec<f64> = (0..2)
        .flat_map(|c| {
            (0..g.len()).map(move |j| {
                let [x, y, _] = g.position(j);
                if c == 0 { x.sin() * y.cos() } else { -x.cos() * y.sin() }
            })
        })
        .collect();
    SpectralField::from_samples(g, 2, &samples).unwrap()
}

#[test]
fn taylor_green_flux_is_the_expanded_gradient() {
    let g = grid(16);
    let u = taylor_green(g);
    let d = flux_divergence(&u, &u).unwrap();
    // u . grad u = (sin 2x / 2, sin 2y / 2): coefficient -i/4 at +2, +i/4 at -2.
    let mut want = SpectralField::zeros(g, 2);
    let len = g.len();
    for (c, axis) in [(0usize, 0usize), (1, 1)] {
        for (k, v) in [(2i64, -0.25), (-2, 0.25)] {
            let mut w = [0i64; 3];
            w[axis] = k;
            want.coeffs[c * len + g.flat_wrapped(&w)] = Complex64::new(0.0, v);
        }
    }
    assert!(d.sub(&want).unwrap().max_coeff() < 1e-15);
    assert!(nonlinear_flux(&u, &u).unwrap().max_coeff() < 1e-15);
}

#[test]
fn taylor_green_decays_exactly() {
    let g = grid(16);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.3, 12).unwrap();
    let a = taylor_green(g).scale(0.3);
    let s = picard_solve(&a, &t, &p, &PicardConfig::default()).unwrap();
    assert!(s.converged);
    let rate = 2f64.powf(p.beta);
    for (f, &tt) in s.u.node_fields().iter().zip(&t.nodes) {
        let want = a.scale((-rate * tt).exp());
        assert!(f.sub(&want).unwrap().max_coeff() < 1e-14);
    }
}

#[test]
fn nonlinearity_is_orthogonal_to_the_velocity() {
    let g = grid(32);
    for seed in 0..5 {
        let u = random_field(g, 2, seed, 1.0, 10, true);
        let u = u.scale(1.0 / u.l2_norm());
        let n = nonlinear_flux(&u, &u).unwrap();
        let ip = n.inner(&u).unwrap();
        assert!(ip.norm() < 1e-10 * n.l2_norm().max(1.0), "seed {seed}: {ip}");
    }
}

#[test]
fn bilinear_quadrature_is_second_order() {
    let g = grid(16);
    let p = params();
    let a = random_field(g, 2, 11, 1.0, 4, true);
    let b = random_field(g, 2, 12, 1.0, 4, true);
    let t0 = TimeGrid::geometric(1.0, 1.6, 10).unwrap();
    let t1 = t0.refined().unwrap();
    let t2 = t1.refined().unwrap();
    let eval = |t: &TimeGrid| {
        let u = Trajectory::linear(&a, t.clone(), p.beta).unwrap();
        let v = Trajectory::linear(&b, t.clone(), p.beta).unwrap();
        bilinear_b(&u, &v, &p).unwrap()
    };
    let (b0, b1, b2) = (eval(&t0), eval(&t1), eval(&t2));
    let (mut e01, mut e12) = (0.0f64, 0.0f64);
    for &tt in &t0.nodes {
        let f0 = &b0.fields[b0.index_at(tt).unwrap()];
        let f1 = &b1.fields[b1.index_at(tt).unwrap()];
        let f2 = &b2.fields[b2.index_at(tt).unwrap()];
        e01 = e01.max(f0.sub(f1).unwrap().l2_norm());
        e12 = e12.max(f1.sub(f2).unwrap().l2_norm());
    }
    let order = (e01 / e12).log2();
    assert!(order >= 1.9, "observed order {order} ({e01:e}, {e12:e})");
}

#[test]
fn first_increment_scales_with_the_amplitude() {
    let g = grid(16);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.4, 10).unwrap();
    let a = random_field(g, 2, 5, 1.5, 3, true);
    let rel = |amp: f64| {
        let a = a.scale(amp / a.max_coeff());
        let s = picard_solve(&a, &t, &p, &PicardConfig { j_max: 1, ..Default::default() }).unwrap();
        s.increments[0] / s.linear_norm
    };
    let (r1, r2) = (rel(1e-6), rel(1e-5));
    assert!(r1 < 1e-4);
    assert!((r2 / r1 - 10.0).abs() < 1e-6, "{}", r2 / r1);
}

#[test]
fn residuals_of_linear_zero_and_converged_states() {
    let g = grid(32);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.25, 16).unwrap();
    let a = random_field(g, 2, 9, 1.5, 4, true);
    let lin = residual(&Trajectory::linear(&a, t.clone(), p.beta).unwrap(), &p, false).unwrap();
    assert!(lin.max_relative < 1e-10, "{}", lin.max_relative);
    let zero = residual(&Trajectory::zeros(t.clone(), g, 2), &p, true).unwrap();
    assert_eq!(zero.max_relative, 0.0);
    assert!(zero.absolute.iter().all(|&x| x == 0.0));
    let small = picard_solve(&a.scale(1e-2), &t, &p, &PicardConfig::default()).unwrap();
    assert!(small.converged);
    let r = residual(&small.u, &p, true).unwrap();
    assert!(r.max_relative < 1e-4, "{}", r.max_relative);
    let short = TimeGrid::geometric(1.0, 1.25, 3).unwrap();
    let two = Trajectory::zeros(short, g, 2);
    assert!(residual(&two, &p, true).is_ok());
}

#[test]
fn converged_solution_is_solenoidal_and_dissipative() {
    let g = grid(32);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.25, 16).unwrap();
    let a = random_field(g, 2, 21, 1.0, 5, true);
    let th = smallness_threshold(&a, &t, &p, 0.05).unwrap();
    let s = picard_solve(&a.scale(0.5 * th.data_scale), &t, &p, &PicardConfig::default()).unwrap();
    assert!(s.converged);
    assert_eq!(s.regime, Regime::Contracting);
    assert!(s.max_divergence < 1e-10);
    assert!(s.divergence.iter().all(|&d| d < 1e-10));
    let e: Vec<f64> = s.u.fields.iter().map(|f| f.l2_norm()).collect();
    for w in e.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-6), "{} > {}", w[1], w[0]);
    }
}

#[test]
fn solutions_are_scaling_covariant() {
    let g = grid(32);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.3, 12).unwrap();
    let a = random_field(g, 2, 4, 1.5, 3, true).scale(0.2);
    let rep = scaling_covariance(&a, &t, &p, 2.0, &PicardConfig::default()).unwrap();
    assert!(rep.max_relative < 1e-2, "{}", rep.max_relative);
    assert_eq!(rep.relative.len(), t.len());
}

#[test]
fn single_mode_derivative_norms_match_the_scalar_maximum() {
    let g = grid(16);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.2, 20).unwrap();
    let m = 2usize;
    // a = (cos(m y), 0): divergence-free, no self-interaction.
    let samples: Vec<f64> =
        (0..2).flat_map(|c| (0..g.len()).map(move |j| if c == 0 { (m as f64 * g.position(j)[1]).cos() } else { 0.0 })).collect();
    let a = SpectralField::from_samples(g, 2, &samples).unwrap();
    let tab = linear_part_regularity(&a, &t, &p, 2, &PicardConfig::default()).unwrap();
    let lam = (m as f64).powf(2.0 * p.beta);
    for row in &tab.rows {
        let e = 1.0 - 1.0 / (2.0 * p.beta) + row.k as f64 / (2.0 * p.beta);
        let want = t.nodes.iter().map(|&s| s.powf(e) * (m as f64).powi(row.k as i32) * (-s * lam).exp()).fold(0.0, f64::max);
        assert!((row.linear_inf - want).abs() < 1e-12 * want, "k={}: {} vs {want}", row.k, row.linear_inf);
        assert!((row.solution_inf - want).abs() < 1e-12 * want);
        // The continuous maximum sits within one grid ratio of a node.
        let cont = (e / lam).powf(e) * (-e).exp() * (m as f64).powi(row.k as i32);
        assert!(want <= cont * (1.0 + 1e-12) && want > 0.98 * cont);
    }
}

#[test]
fn regularity_ratios_are_refinement_stable() {
    let g = grid(32);
    let p = params();
    let t = TimeGrid::geometric(1.0, 1.3, 16).unwrap();
    let a = random_field(g, 2, 8, 1.5, 4, true).scale(0.1);
    let cfg = PicardConfig::default();
    let coarse = linear_part_regularity(&a, &t, &p, 2, &cfg).unwrap();
    let fine = linear_part_regularity(&a, &t.refined().unwrap(), &p, 2, &cfg).unwrap();
    assert!(coarse.all_finite() && fine.all_finite());
    assert!(coarse.q_inverse_norm > 0.0);
    let shift = coarse.max_relative_shift(&fine);
    assert!(shift < 0.15, "{shift}");
}
