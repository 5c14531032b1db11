use super::{max_of, CheckOutcome, SuiteOutput};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::ops::{divergence_defect, partial_derivative};
use spectral_core::synth::random_field;
use spectral_core::{heat_semigroup, leray_project, SpectralField, TorusGrid};
use std::f64::consts::PI;

const TOL: f64 = 1e-12;
const SEEDS: std::ops::Range<u64> = 0..4;

pub(super) fn semigroup() -> Result<SuiteOutput> {
    let g = TorusGrid::new(2, 64, 2.0 * PI)?;
    let mut out = SuiteOutput::default();

    let mut law: f64 = 0.0;
    for seed in SEEDS {
        let f = random_field(g, 1, seed, 1.0, 24, false);
        for &(s, t, beta) in &[(0.01, 0.3, 0.6), (0.5, 1.2, 0.75), (0.1, 0.05, 0.95), (1.0, 1.0, 1.0)] {
            let a = heat_semigroup(&heat_semigroup(&f, s, beta)?, t, beta)?;
            let b = heat_semigroup(&f, s + t, beta)?;
            law = law.max(a.sub(&b)?.l2_norm() / f.l2_norm());
        }
    }
    out.push(CheckOutcome::at_most("semigroup_law", law, TOL, "max ||S(t)S(s)f - S(s+t)f|| / ||f||, 16 cases"));

    let (mut idem, mut annih, mut div, mut fixed) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in SEEDS {
        let u = random_field(g, 2, 100 + seed, 0.5, 24, false);
        let pu = leray_project(&u)?;
        idem = idem.max(leray_project(&pu)?.sub(&pu)?.max_coeff() / u.max_coeff());
        div = div.max(divergence_defect(&pu)?);
        let phi = random_field(g, 1, 200 + seed, 1.0, 24, false);
        let grad = SpectralField::stack(&[partial_derivative(&phi, 0)?, partial_derivative(&phi, 1)?])?;
        annih = annih.max(leray_project(&grad)?.max_coeff() / grad.max_coeff());
        let w = random_field(g, 2, 300 + seed, 0.5, 24, true);
        fixed = fixed.max(leray_project(&w)?.sub(&w)?.max_coeff() / w.max_coeff());
    }
    out.push(CheckOutcome::at_most("leray_idempotence", idem, TOL, "max |PPu - Pu| / max |u| over coefficients"));
    out.push(CheckOutcome::at_most("leray_annihilates_gradients", annih, TOL, "max |P grad phi| / max |grad phi|"));
    out.push(CheckOutcome::at_most("leray_divergence_free", div, TOL, "relative divergence defect of Pu"));
    out.push(CheckOutcome::at_most("leray_fixes_solenoidal", fixed, TOL, "max |Pw - w| / max |w| for div w = 0"));

    let mut spectral_trip: f64 = 0.0;
    let mut sample_trip: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in SEEDS {
        let f = random_field(g, 2, 400 + seed, 0.0, 31, false);
        let back = SpectralField::from_samples(g, 2, &f.to_samples())?;
        spectral_trip = spectral_trip.max(back.sub(&f)?.max_coeff() / f.max_coeff());
        // Noise projected once onto the representable band, then sent around again.
        let s: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let smooth = SpectralField::from_samples(g, 1, &s)?;
        let v = smooth.to_samples();
        let again = SpectralField::from_samples(g, 1, &v)?.to_samples();
        let scale = max_of(v.iter().map(|x| x.abs()));
        sample_trip = sample_trip.max(max_of(v.iter().zip(&again).map(|(a, b)| (a - b).abs())) / scale);
    }
    out.push(CheckOutcome::at_most("round_trip_coefficients", spectral_trip, TOL, "fields -> samples -> fields, max coefficient error"));
    out.push(CheckOutcome::at_most("round_trip_samples", sample_trip, TOL, "samples -> fields -> samples, max sample error"));
    Ok(out)
}
