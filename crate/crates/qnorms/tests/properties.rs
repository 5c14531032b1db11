use proptest::prelude::*;
use qnorms::checks::EmbeddingContext;
use qnorms::qspace::cube_energies;
use qnorms::*;
use spectral_core::synth::random_field;

fn grid() -> TorusGrid {
    TorusGrid::new(2, 16, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_shift_leaves_q_norm_unchanged(seed in 0u64..10_000, c in -5.0f64..5.0) {
        let g = grid();
        let p = FracParams::new(0.2, 0.7).unwrap();
        let fam = CubeFamily::dyadic(g).unwrap();
        let f = random_field(g, 1, seed, 1.0, 5, false);
        let a = q_norm(&f, &p, &fam).unwrap().value;
        let b = q_norm(&f.add_constant(c), &p, &fam).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn homogeneity(seed in 0u64..10_000, c in -10.0f64..10.0) {
        let g = grid();
        let p = FracParams::new(0.2, 0.7).unwrap();
        let fam = CubeFamily::dyadic(g).unwrap();
        let f = random_field(g, 1, seed, 1.0, 5, false);
        let a = q_norm(&f.scale(c), &p, &fam).unwrap().value;
        let b = c.abs() * q_norm(&f, &p, &fam).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn alpha_monotonicity_per_cube(seed in 0u64..10_000, a1 in 0.0f64..0.6, gap in 0.0f64..0.3) {
        let g = grid();
        let beta = 0.95;
        let a2 = (a1 + gap).min(0.94);
        let fam = CubeFamily::dyadic(g).unwrap();
        let v = random_field(g, 1, seed, 0.5, 7, false).to_samples();
        let s = Samples::new(g, 1, &v).unwrap();
        let lo = cube_energies(&s, a1, beta, &fam).unwrap();
        let hi = cube_energies(&s, a2, beta, &fam).unwrap();
        let k = 2f64.powf(a2 - a1);
        for (x, y) in lo.iter().zip(&hi) {
            prop_assert!(*x <= k * y * (1.0 + 1e-13));
        }
    }

    #[test]
    fn poincare_explicit_steps(seed in 0u64..10_000, start in 4usize..8, a1 in 0.0f64..0.4, gap in 0.0f64..0.3) {
        let g = grid();
        let f = random_field(g, 1, seed, 1.0, 6, false);
        let cube = Cube { start: [start, start, 0], side: 4 };
        let r = poincare_check(&f, &cube, a1, a1 + gap, 0.8).unwrap();
        prop_assert!(r.explicit_steps_hold(1e-12));
    }

    #[test]
    fn carleson_nonneg_and_monotone_in_horizon(seed in 0u64..10_000) {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let p = FracParams::new(0.3, 0.8).unwrap();
        let balls = BallFamily::standard(g).unwrap();
        let times = carleson_time_grid(&balls, p.beta).unwrap();
        let f = random_field(g, 1, seed, 1.0, 6, false);
        let small = carleson_q_inverse_norm(&f, &p, 0.04, &balls, &times, RadiusRange::PowerBeta).unwrap().value;
        let big = carleson_q_inverse_norm(&f, &p, 0.2, &balls, &times, RadiusRange::PowerBeta).unwrap().value;
        prop_assert!(0.0 <= small && small <= big);
    }
}

#[test]
fn poincare_batch_with_fitted_gradient_constant() {
    // Calibrate on one batch, validate on a disjoint one with twice the calibrated constant.
    let g = TorusGrid::new(2, 32, 1.0).unwrap();
    let fam = CubeFamily::dyadic(g).unwrap();
    let cubes: Vec<Cube> = fam.cubes.iter().step_by(fam.len() / 50).take(50).copied().collect();
    let run = |seeds: std::ops::Range<u64>| {
        let mut worst: f64 = 0.0;
        for seed in seeds {
            let f = random_field(g, 1, seed, 1.5, 6, false);
            for c in &cubes {
                let r = poincare_check(&f, c, 0.1, 0.5, 0.8).unwrap();
                assert!(r.explicit_steps_hold(1e-12));
                if let Some(q) = r.gradient_ratio() {
                    worst = worst.max(q);
                }
            }
        }
        worst
    };
    let fitted = 2.0 * run(0..4);
    let validated = run(1000..1004);
    assert!(validated <= fitted, "{validated} > {fitted}");
}

#[test]
fn riesz_and_divergence_batches_stay_bounded() {
    let g = TorusGrid::new(2, 32, 1.0).unwrap();
    let p = FracParams::new(0.3, 0.8).unwrap();
    let setup = CarlesonSetup::standard(g, p.beta).unwrap();
    let cubes = CubeFamily::dyadic(g).unwrap();
    let mut riesz: Vec<f64> = Vec::new();
    let mut div: Vec<f64> = Vec::new();
    for seed in 0..6 {
        let f = random_field(g, 1, 500 + seed, 1.0, 6, false);
        riesz.push(riesz_stability_check(&f, &p, &setup).unwrap().max_ratio);
        let d = divergence_representation_check(&f, &p, &setup, &cubes).unwrap();
        assert!(d.residual < 1e-12);
        div.push(d.ratio.unwrap());
    }
    let max_r = riesz.iter().copied().fold(0.0, f64::max);
    assert!(max_r.is_finite() && max_r < 5.0, "{riesz:?}");
    let (lo, hi) = div.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo < 10.0, "{div:?}");
}

#[test]
fn embedding_ratios_are_finite_for_admissible_triples() {
    let g = TorusGrid::new(2, 32, 1.0).unwrap();
    let p = FracParams::new(0.3, 0.8).unwrap();
    let setup = CarlesonSetup::standard(g, p.beta).unwrap();
    let cubes = CubeFamily::dyadic(g).unwrap();
    let ctx = EmbeddingContext { cubes: &cubes, setup: &setup };
    for pair in [
        EmbeddingPair::BesovIntoQ { q: 2.0 },
        EmbeddingPair::BesovIntoQInverse { p: 4.0, q: 2.0 },
        EmbeddingPair::QInverseIntoBesov,
    ] {
        for seed in 0..3 {
            let f = random_field(g, 1, 900 + seed, 1.0, 6, false);
            let r = embedding_check(&f, &p, pair, &ctx).unwrap();
            let v = r.ratio.unwrap();
            assert!(v.is_finite() && v > 0.0, "{pair:?}: {v}");
        }
    }
}
