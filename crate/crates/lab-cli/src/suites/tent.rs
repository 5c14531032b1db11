use super::{max_of, CheckOutcome, SuiteOutput};
use crate::error::Result;
use qnorms::{BallFamily, Cube, CubeFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::synth::random_field;
use spectral_core::{FracParams, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use std::collections::HashSet;
use std::f64::consts::PI;
use tentspace::*;

fn params() -> FracParams {
    FracParams::new(0.3, 0.8).expect("admissible parameters")
}

fn times() -> Result<TimeGrid> {
    Ok(TimeGrid::dyadic_cells(1.0 / 128.0, 5, 2)?)
}

fn grid() -> Result<TorusGrid> {
    Ok(TorusGrid::new(2, 32, 1.0)?)
}

/// `int_lo^hi t^{-a} dt`.
fn cell_weight(lo: f64, hi: f64, a: f64) -> f64 {
    if (a - 1.0).abs() < 1e-14 {
        (hi / lo).ln()
    } else {
        (hi.powf(1.0 - a) - lo.powf(1.0 - a)) / (1.0 - a)
    }
}

fn atom_margins(out: &mut SuiteOutput) -> Result<()> {
    let g = grid()?;
    let t = times()?;
    let p = params();
    let a1 = 1.0 - 2.0 * (p.alpha - p.beta + 1.0);
    let d = 2.0 - 2.0 * (p.alpha + p.beta - 1.0);
    let mut err: f64 = 0.0;
    let mut wrong_flags = 0;
    for (k, r) in [0.08, 0.1, 0.17, 0.3, 0.45].into_iter().enumerate() {
        for s in [0.5, 1.0, 1.3] {
            let atom = TentAtom::indicator(t.clone(), g, [0.5, 0.4, 0.0], r, &p)?.scaled(s + 0.1 * k as f64);
            let cert = validate_atom(&atom, &p);
            let v = atom.entries.iter().map(|&(i, _, val)| val * val * cell_weight(t.lo[i], t.hi[i], a1)).sum::<f64>()
                * g.cell_volume();
            let bound = (PI * r * r).powf(-d / 2.0);
            err = err.max((cert.functional - v).abs() / v).max((cert.margin - (bound - v)).abs() / bound);
            if cert.pass != (v <= bound * (1.0 + 1e-10)) {
                wrong_flags += 1;
            }
        }
    }
    let mut bad = TentAtom::indicator(t, g, [0.5, 0.5, 0.0], 0.1, &p)?;
    bad.entries.push((0, g.flat(&[0, 0, 0]), 1e-3));
    let cert = validate_atom(&bad, &p);
    if cert.pass || cert.support_ok {
        wrong_flags += 1;
    }
    out.push(CheckOutcome::at_most("atom_margin_error", err, 1e-10, "functional and margin against direct sums, 15 atoms"));
    out.push(CheckOutcome::none("atom_flag_errors", wrong_flags, "pass flags, including one atom with support outside its tent"));
    Ok(())
}

fn localized(g: TorusGrid, t: &TimeGrid, seed: u64, center: [f64; 3], width: f64, t_max: f64) -> HalfSpaceSample {
    let slices: Vec<Vec<f64>> =
        (0..t.len()).map(|i| random_field(g, 1, seed * 1000 + i as u64, 1.0, 6, false).to_samples()).collect();
    HalfSpaceSample::from_fn(t.clone(), g, |i, t, j, x| {
        let r = torus_distance(&g, x, center);
        if t < t_max && r < width { slices[i][j] * (1.0 - r / width) * t.sqrt() } else { 0.0 }
    })
}

fn decompositions(out: &mut SuiteOutput) -> Result<()> {
    let g = grid()?;
    let t = times()?;
    let p = params();
    let mut residual: f64 = 0.0;
    let mut overlaps = 0;
    let mut invalid = 0;
    let mut atoms = 0;
    for seed in 0..8u64 {
        let c = [0.3 + 0.05 * seed as f64, 0.6, 0.0];
        let f = localized(g, &t, seed, c, 0.1 + 0.03 * seed as f64, 0.05 + 0.02 * seed as f64);
        for om in [maximal_omega(&f, 1.0), power_omega(&f, 1.0)] {
            let dec = atomic_decompose(&f, &om, &p)?;
            residual = residual.max(dec.residual);
            let mut seen = HashSet::new();
            let mut clash = !dec.disjoint;
            for a in &dec.atoms {
                atoms += 1;
                if !validate_atom(&a.atom, &p).pass {
                    invalid += 1;
                }
                for &(i, x, _) in &a.atom.entries {
                    clash |= !seen.insert((i, x));
                }
            }
            let support = f.values.iter().filter(|v| **v != 0.0).count();
            if clash || seen.len() != support {
                overlaps += 1;
            }
        }
    }
    out.push(CheckOutcome::at_most("decomposition_residual", residual, 1e-10, "max |sum lambda a - F| / max |F|, 16 decompositions"));
    out.push(CheckOutcome::none("decomposition_overlaps", overlaps, "decompositions whose regions overlap or miss support samples"));
    out.push(CheckOutcome::none("invalid_atoms", invalid, format!("{atoms} atoms validated")));
    Ok(())
}

/// Per-node spectral slices of one random half-space function.
fn slices(g: TorusGrid, t: &TimeGrid, seed: u64) -> Vec<SpectralField> {
    (0..t.len()).map(|i| random_field(g, 1, seed * 1000 + i as u64, 1.0, 5, false)).collect()
}

fn sample(t: &TimeGrid, s: &[SpectralField], bump: Option<([f64; 3], f64, f64)>) -> HalfSpaceSample {
    let vals: Vec<Vec<f64>> = s.iter().map(|f| f.to_samples()).collect();
    let g = s[0].grid;
    HalfSpaceSample::from_fn(t.clone(), g, |i, t, j, x| {
        let w = match bump {
            Some((c, width, t_max)) => {
                let r = torus_distance(&g, x, c);
                if t < t_max && r < width { 1.0 - r / width } else { 0.0 }
            }
            None => 1.0,
        };
        vals[i][j] * w * t.powf(0.3)
    })
}

struct Pair {
    f: HalfSpaceSample,
    upper: f64,
    extremal: HalfSpaceSample,
    noise: HalfSpaceSample,
    balls: BallFamily,
}

fn pair(seed: u64) -> Result<Pair> {
    let g = grid()?;
    let t = times()?;
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), 0.0];
    let bump = (c, rng.gen_range(0.1..0.3), rng.gen_range(0.03..0.25));
    let f = sample(&t, &slices(g, &t, 2 * seed), Some(bump));
    let noise = sample(&t, &slices(g, &t, 2 * seed + 1), None);
    let balls = BallFamily::standard(g)?;
    let cands = vec![
        ("N(F)".to_string(), maximal_omega(&f, 1.0)),
        ("N(F)^1/2".to_string(), maximal_omega(&f, 0.5)),
        ("|F|".to_string(), power_omega(&f, 1.0)),
    ];
    let b = t1_norm_bracket(&f, &cands, &p, &balls)?;
    let om = &cands.iter().find(|(n, _)| *n == b.best).expect("best candidate is listed").1;
    let (om, _) = normalize_omega(om, capacity_dim(&p, 2))?;
    let g_best = duality_test_function(&f, &om, &p)?;
    let extremal = g_best.scale(1.0 / t_infty_norm(&g_best, &p, &balls)?.value);
    let noise = noise.scale(1.0 / t_infty_norm(&noise, &p, &balls)?.value);
    Ok(Pair { f, upper: b.upper, extremal, noise, balls })
}

/// `|<F, G>| / (upper(F) ||G||_{T^inf})` for `G = theta extremal + (1 - theta) noise`.
fn pairing_ratio(pr: &Pair, theta: f64) -> Result<f64> {
    let mut gt = pr.noise.scale(1.0 - theta);
    gt.values.iter_mut().zip(&pr.extremal.values).for_each(|(a, b)| *a += theta * b);
    let ginf = t_infty_norm(&gt, &params(), &pr.balls)?.value;
    Ok(pairing(&pr.f, &gt)?.abs() / (pr.upper * ginf))
}

fn pairing_inequality(out: &mut SuiteOutput) -> Result<()> {
    let calib = (100..110).map(|s| pairing_ratio(&pair(s)?, 1.0)).collect::<Result<Vec<_>>>()?;
    let fitted = 1.25 * max_of(calib);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ratios = (0..50).map(|s| pairing_ratio(&pair(s)?, rng.gen_range(0.0..1.0))).collect::<Result<Vec<_>>>()?;
    let bad = ratios.iter().filter(|&&r| !(r <= fitted)).count();
    out.push(CheckOutcome::none(
        "pairing_violations",
        bad,
        format!("constant {fitted:.4} fitted on 10 extremal pairs; largest of 50 mixed pairs {:.4}", max_of(ratios)),
    ));
    Ok(())
}

fn single_cube(out: &mut SuiteOutput) -> Result<()> {
    let g = grid()?;
    let mut err: f64 = 0.0;
    for level in 0..=5u32 {
        let side = 1usize << level;
        for start in [[0, 0, 0], [(32 - side) / side / 2 * side, 0, 0], [32 - side, 32 - side, 0]] {
            let mut set = vec![false; g.len()];
            DyadicCube { level, start }.samples(&g).into_iter().for_each(|i| set[i] = true);
            for d in [0.7, 1.5, 2.0] {
                let c = hausdorff_capacity(&g, &set, d)?;
                let want = (side as f64 / 32.0).powf(d);
                err = err.max((c.upper.value - want).abs()).max((c.lower - want).abs());
            }
        }
    }
    out.push(CheckOutcome::at_most("single_cube_capacity", err, 1e-14, "max |cap - l^d|, both bounds, 18 cubes x 3 d"));
    Ok(())
}

/// Every value of a minimal dyadic cover of `set` inside `[lo, lo + side)`.
fn all_covers(set: &[bool], lo: usize, side: usize, h: f64, d: f64) -> Vec<f64> {
    if !set[lo..lo + side].iter().any(|&s| s) {
        return vec![0.0];
    }
    let own = (side as f64 * h).powf(d);
    if side == 1 {
        return vec![own];
    }
    let left = all_covers(set, lo, side / 2, h, d);
    let right = all_covers(set, lo + side / 2, side / 2, h, d);
    let mut out = vec![own];
    for a in &left {
        out.extend(right.iter().map(|b| a + b));
    }
    out
}

fn exhaustive(set: &[bool], h: f64, d: f64) -> f64 {
    if set.iter().any(|&v| v) { all_covers(set, 0, set.len(), h, d).into_iter().fold(f64::INFINITY, f64::min) } else { 0.0 }
}

fn union_of_cubes(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    let mut set = vec![false; n];
    for _ in 0..rng.gen_range(1..5) {
        let side = 1 << rng.gen_range(0..4);
        let start = rng.gen_range(0..n / side) * side;
        set[start..start + side].iter_mut().for_each(|v| *v = true);
    }
    set
}

fn subadditivity(out: &mut SuiteOutput) -> Result<()> {
    let g = TorusGrid::new(1, 32, 1.0)?;
    let h = g.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut violations = 0;
    let mut tree_err: f64 = 0.0;
    for d in [0.4, 0.8] {
        for _ in 0..60 {
            let a = union_of_cubes(&mut rng, 32);
            let b = union_of_cubes(&mut rng, 32);
            let uni: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
            let int: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
            let cap = |s: &[bool]| exhaustive(s, h, d);
            if cap(&uni) + cap(&int) > (cap(&a) + cap(&b)) * (1.0 + 1e-12) {
                violations += 1;
            }
            tree_err = tree_err.max((capacity_value(&g, &uni, d)? - cap(&uni)).abs());
        }
    }
    out.push(CheckOutcome::none("subadditivity_violations", violations, "exhaustive cover search, N = 32, 120 pairs"));
    out.push(CheckOutcome::at_most("tree_vs_exhaustive", tree_err, 1e-12, "tree capacity against the exhaustive minimum"));
    Ok(())
}

pub(super) fn machinery() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    atom_margins(&mut out)?;
    decompositions(&mut out)?;
    pairing_inequality(&mut out)?;
    single_cube(&mut out)?;
    subadditivity(&mut out)?;
    Ok(out)
}

fn all_dyadic_cubes(g: TorusGrid) -> Result<CubeFamily> {
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
    Ok(CubeFamily::from_cubes(g, cubes)?)
}

fn embedding_ratio(seed: u64, cubes: &CubeFamily) -> Result<f64> {
    let g = grid()?;
    let t = times()?;
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
    let b: f64 = rng.gen_range(-0.5..0.5);
    let s: Vec<Vec<f64>> = slices(g, &t, seed + 500).iter().map(|f| f.to_samples()).collect();
    let mu = HalfSpaceSample::from_fn(t.clone(), g, |i, t, j, _| s[i][j] * s[i][j] * t.powf(b));
    let f = sample(&t, &slices(g, &t, seed + 900), None);
    Ok(carleson_embedding_check(&mu, &f, capacity_dim(&p, 2), cubes)?.ratio)
}

pub(super) fn embedding() -> Result<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let cubes = all_dyadic_cubes(grid()?)?;
    let calib = (1000..1010).map(|s| embedding_ratio(s, &cubes)).collect::<Result<Vec<_>>>()?;
    let fitted = 2.0 * max_of(calib);
    let ratios = (0..50).map(|s| embedding_ratio(s, &cubes)).collect::<Result<Vec<_>>>()?;
    let bad = ratios.iter().filter(|&&r| !(r.is_finite() && r > 0.0 && r <= fitted)).count();
    out.push(CheckOutcome::none(
        "embedding_violations",
        bad,
        format!(
            "constant {fitted:.4} = 2 x max of 10 calibration pairs; 50 validation ratios in [{:.4}, {:.4}]",
            super::min_of(ratios.iter().copied()),
            max_of(ratios.iter().copied())
        ),
    ));
    Ok(out)
}
