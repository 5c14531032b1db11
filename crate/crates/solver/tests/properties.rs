use proptest::prelude::*;
use solver::*;
use spectral_core::synth::random_field;
use spectral_core::ops::divergence_defect;
use spectral_core::{FracParams, TimeGrid, TorusGrid};
use std::f64::consts::PI;

fn trajectories(seed: u64) -> (Trajectory, Trajectory, FracParams) {
    let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
    let p = FracParams::new(0.2, 0.8).unwrap();
    let t = TimeGrid::geometric(1.0, 1.5, 8).unwrap();
    let u = Trajectory::linear(&random_field(g, 2, seed, 1.0, 5, true), t.clone(), p.beta).unwrap();
    let v = Trajectory::linear(&random_field(g, 2, seed + 1, 1.0, 5, false), t, p.beta).unwrap();
    (u, v, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn symmetrized_bilinear_is_exactly_symmetric(seed in 0u64..1000) {
        let (u, v, p) = trajectories(seed);
        let a = bilinear_sum(&[(&u, &v), (&v, &u)], &p).unwrap();
        let b = bilinear_sum(&[(&v, &u), (&u, &v)], &p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bilinear_is_quadratically_homogeneous(seed in 0u64..1000, c in -5.0f64..5.0) {
        let (u, _, p) = trajectories(seed);
        let b = bilinear_b(&u, &u, &p).unwrap();
        let bc = bilinear_b(&u.scale(c), &u.scale(c), &p).unwrap();
        let scale = b.fields.iter().map(|f| f.max_coeff()).fold(0.0, f64::max);
        for (x, y) in bc.fields.iter().zip(&b.fields) {
            prop_assert!(x.sub(&y.scale(c * c)).unwrap().max_coeff() <= 1e-12 * c * c * scale);
        }
    }

    #[test]
    fn bilinear_output_is_solenoidal(seed in 0u64..1000) {
        let (u, v, p) = trajectories(seed);
        let b = bilinear_b(&u, &v, &p).unwrap();
        for f in &b.fields {
            prop_assert!(divergence_defect(f).unwrap() < 1e-12);
        }
    }
}
