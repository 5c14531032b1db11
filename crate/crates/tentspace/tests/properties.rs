use proptest::prelude::*;
use qnorms::{BallFamily, Cube, CubeFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::synth::random_field;
use spectral_core::{refine, FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use tentspace::*;

fn params() -> FracParams {
    FracParams::new(0.3, 0.8).unwrap()
}

fn times() -> TimeGrid {
    TimeGrid::dyadic_cells(1.0 / 128.0, 5, 2).unwrap()
}

/// Per-node spectral slices, so the same pair can be sampled on a refined grid.
fn slices(g: TorusGrid, t: &TimeGrid, seed: u64) -> Vec<SpectralField> {
    (0..t.len()).map(|i| random_field(g, 1, seed * 1000 + i as u64, 1.0, 5, false)).collect()
}

fn sample(t: &TimeGrid, s: &[SpectralField], bump: Option<([f64; 3], f64, f64)>, factor: usize) -> HalfSpaceSample {
    let fine: Vec<Vec<f64>> = s.iter().map(|f| refine(f, factor).unwrap().to_samples()).collect();
    let g = refine(&s[0], factor).unwrap().grid;
    HalfSpaceSample::from_fn(t.clone(), g, |i, t, j, x| {
        let w = match bump {
            Some((c, width, t_max)) => {
                let r = torus_distance(&g, x, c);
                if t < t_max && r < width { 1.0 - r / width } else { 0.0 }
            }
            None => 1.0,
        };
        fine[i][j] * w * t.powf(0.3)
    })
}

fn omegas(f: &HalfSpaceSample) -> Vec<(String, HalfSpaceSample)> {
    vec![
        ("N(F)".to_string(), maximal_omega(f, 1.0)),
        ("N(F)^1/2".to_string(), maximal_omega(f, 0.5)),
        ("|F|".to_string(), power_omega(f, 1.0)),
    ]
}

struct Pair {
    f: HalfSpaceSample,
    upper: f64,
    /// Test function of the best normalized weight, scaled to unit `T^inf` norm.
    extremal: HalfSpaceSample,
    noise: HalfSpaceSample,
    balls: BallFamily,
}

fn pair(seed: u64, factor: usize) -> Pair {
    let g = TorusGrid::new(2, 32, 1.0).unwrap();
    let t = times();
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), 0.0];
    let bump = (c, rng.gen_range(0.1..0.3), rng.gen_range(0.03..0.25));
    let f = sample(&t, &slices(g, &t, 2 * seed), Some(bump), factor);
    let noise = sample(&t, &slices(g, &t, 2 * seed + 1), None, factor);
    let balls = BallFamily::standard(g).unwrap().refined(factor).unwrap();
    let cands = omegas(&f);
    let b = t1_norm_bracket(&f, &cands, &p, &balls).unwrap();
    let om = &cands.iter().find(|(n, _)| *n == b.best).unwrap().1;
    let (om, _) = normalize_omega(om, capacity_dim(&p, 2)).unwrap();
    let g_best = duality_test_function(&f, &om, &p).unwrap();
    let extremal = g_best.scale(1.0 / t_infty_norm(&g_best, &p, &balls).unwrap().value);
    let noise = noise.scale(1.0 / t_infty_norm(&noise, &p, &balls).unwrap().value);
    Pair { f, upper: b.upper, extremal, noise, balls }
}

/// `|<F, G>| / (upper(F) ||G||_{T^inf})` with `G = theta * extremal + (1 - theta) * noise`.
fn pairing_ratio(pr: &Pair, theta: f64) -> f64 {
    let mut gt = pr.noise.scale(1.0 - theta);
    gt.values.iter_mut().zip(&pr.extremal.values).for_each(|(a, b)| *a += theta * b);
    let ginf = t_infty_norm(&gt, &params(), &pr.balls).unwrap().value;
    pairing(&pr.f, &gt).unwrap().abs() / (pr.upper * ginf)
}

#[test]
fn pairing_inequality_with_one_fitted_constant() {
    // The constant is fitted on extremal test functions of a calibration set, with the
    // same 20% allowance as the refinement check.
    let fitted = 1.25 * (100..110).map(|s| pairing_ratio(&pair(s, 1), 1.0)).fold(0.0f64, f64::max);
    let fine = (100..104).map(|s| pairing_ratio(&pair(s, 2), 1.0)).fold(0.0f64, f64::max);
    let coarse = (100..104).map(|s| pairing_ratio(&pair(s, 1), 1.0)).fold(0.0f64, f64::max);
    assert!((fine - coarse).abs() <= 0.2 * coarse, "refined {fine} vs coarse {coarse}");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ratios: Vec<f64> = (0..50).map(|s| pairing_ratio(&pair(s, 1), rng.gen_range(0.0..1.0))).collect();
    let violations = ratios.iter().filter(|&&r| r > fitted).count();
    assert_eq!(violations, 0, "fitted {fitted}, ratios {ratios:?}");
}

fn embedding_ratio(seed: u64) -> f64 {
    let g = TorusGrid::new(2, 32, 1.0).unwrap();
    let t = times();
    let p = params();
    let d = capacity_dim(&p, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
    let b: f64 = rng.gen_range(-0.5..0.5);
    let s = slices(g, &t, seed + 500);
    let mu = HalfSpaceSample::from_fn(t.clone(), g, |i, t, j, _| {
        let v = s[i].to_samples()[j];
        v * v * t.powf(b)
    });
    let f = sample(&t, &slices(g, &t, seed + 900), None, 1);
    carleson_embedding_check(&mu, &f, d, &all_dyadic_cubes(g)).unwrap().ratio
}

fn all_dyadic_cubes(g: TorusGrid) -> CubeFamily {
    let mut cubes = Vec::new();
    let mut side = 1;
    while side <= g.n() {
        for a in 0..g.n() / side {
            for b in 0..g.n() / side {
                cubes.push(Cube { start: [a * side, b * side, 0], side });
            }
        }
        side *= 2;
    }
    CubeFamily::from_cubes(g, cubes).unwrap()
}

#[test]
fn capacitary_embedding_with_one_fitted_constant() {
    let ratios: Vec<f64> = (0..50).map(embedding_ratio).collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    let fitted = ratios[..10].iter().fold(0.0f64, |a, &b| a.max(b));
    let violations = ratios[10..].iter().filter(|&&r| r > 2.0 * fitted).count();
    assert_eq!(violations, 0, "fitted {fitted}, ratios {ratios:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn capacity_is_monotone(seed in 0u64..10_000, extra in 0usize..64) {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small: Vec<bool> = (0..g.len()).map(|_| rng.gen_bool(0.1)).collect();
        let mut big = small.clone();
        for _ in 0..extra {
            big[rng.gen_range(0..g.len())] = true;
        }
        let d = rng.gen_range(0.2..2.0);
        prop_assert!(capacity_value(&g, &small, d).unwrap() <= capacity_value(&g, &big, d).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn strong_subadditivity_in_the_plane(seed in 0u64..10_000) {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || -> Vec<bool> {
            let mut s = vec![false; g.len()];
            for _ in 0..rng.gen_range(1..5) {
                let level = rng.gen_range(0..3u32);
                let side = 1usize << level;
                let start = [rng.gen_range(0..16 / side) * side, rng.gen_range(0..16 / side) * side, 0];
                DyadicCube { level, start }.samples(&g).into_iter().for_each(|i| s[i] = true);
            }
            s
        };
        let a = pick();
        let b = pick();
        let uni: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
        let int: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
        let d = 1.3;
        let cap = |s: &[bool]| capacity_value(&g, s, d).unwrap();
        prop_assert!(cap(&uni) + cap(&int) <= (cap(&a) + cap(&b)) * (1.0 + 1e-12));
    }

    #[test]
    fn bracket_is_homogeneous(seed in 0u64..10_000, c in 0.01f64..100.0) {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let t = times();
        let p = params();
        let balls = BallFamily::standard(g).unwrap();
        let f = sample(&t, &slices(g, &t, seed), Some(([0.5, 0.5, 0.0], 0.2, 0.1)), 1);
        let cf = f.scale(c);
        let a = t1_norm_bracket(&f, &omegas(&f), &p, &balls).unwrap();
        let b = t1_norm_bracket(&cf, &omegas(&cf), &p, &balls).unwrap();
        prop_assert!((b.upper - c * a.upper).abs() <= 1e-12 * c * a.upper);
        prop_assert!((b.lower - c * a.lower).abs() <= 1e-12 * c * a.lower);
        let z = HalfSpaceSample::zeros(t, g, 1);
        let zb = t1_norm_bracket(&z, &omegas(&f), &p, &balls).unwrap();
        prop_assert_eq!((zb.upper, zb.lower), (0.0, 0.0));
    }

    #[test]
    fn decomposition_reconstructs(seed in 0u64..10_000, s in 0.25f64..2.0) {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let t = times();
        let p = params();
        let f = sample(&t, &slices(g, &t, seed), Some(([0.4, 0.6, 0.0], 0.25, 0.12)), 1);
        let dec = atomic_decompose(&f, &power_omega(&f, s), &p).unwrap();
        prop_assert!(dec.residual <= 1e-10 && dec.disjoint);
        for a in &dec.atoms {
            prop_assert!(validate_atom(&a.atom, &p).pass);
        }
    }
}
