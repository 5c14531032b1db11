//! Dyadic rescaling and spectral refinement.

use crate::field::SpectralField;
use crate::{Result, SpectralError};
use num_complex::Complex64;

fn dyadic_factor(lambda: f64) -> Result<usize> {
    if !(lambda >= 1.0) || lambda.fract() != 0.0 || !(lambda as u64).is_power_of_two() {
        return Err(SpectralError::NonDyadic(lambda));
    }
    Ok(lambda as usize)
}

/// `x -> lambda^gamma f(lambda x)` on the same torus: mode `k` moves to `lambda k`.
///
/// Fails with [`SpectralError::Aliasing`] if a nonzero mode would land on or past Nyquist.
pub fn scaling_transform(f: &SpectralField, lambda: f64, gamma: f64) -> Result<SpectralField> {
    let lam = dyadic_factor(lambda)?;
    let g = f.grid;
    let len = g.len();
    let nyq = (g.n() / 2) as i64;
    let amp = lambda.powf(gamma);
    let mut out = SpectralField::zeros(g, f.components);
    out.is_real = f.is_real;
    for c in 0..f.components {
        for idx in 0..len {
            let z = f.coeffs[c * len + idx];
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = g.k_vec(idx);
            let mut target = [0i64; 3];
            for a in 0..g.dim {
                let kk = k[a] * lam as i64;
                if lam > 1 && kk.abs() >= nyq {
                    return Err(SpectralError::Aliasing);
                }
                target[a] = kk;
            }
            let mut ti = [0usize; 3];
            for a in 0..g.dim {
                ti[a] = g.index_of_wavenumber(target[a]);
            }
            out.coeffs[c * len + g.flat(&ti)] = z * amp;
        }
    }
    Ok(out)
}

/// Zero-pad onto a grid with `factor` times as many points per axis (same samples on the coarse nodes).
///
/// A Nyquist coefficient is split evenly between `+N/2` and `-N/2` on the finer grid.
pub fn refine(f: &SpectralField, factor: usize) -> Result<SpectralField> {
    if factor == 0 || !factor.is_power_of_two() {
        return Err(SpectralError::NonDyadic(factor as f64));
    }
    let g = f.grid;
    let fine = g.refined(factor)?;
    let len = g.len();
    let flen = fine.len();
    let nyq = (g.n() / 2) as i64;
    let mut out = SpectralField::zeros(fine, f.components);
    out.is_real = f.is_real;
    if factor == 1 {
        return Ok(f.clone());
    }
    for c in 0..f.components {
        for idx in 0..len {
            let z = f.coeffs[c * len + idx];
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = g.k_vec(idx);
            let split: Vec<usize> = (0..g.dim).filter(|&a| k[a] == nyq).collect();
            let copies = 1usize << split.len();
            for mask in 0..copies {
                let mut ti = [0usize; 3];
                for a in 0..g.dim {
                    let mut ka = k[a];
                    if let Some(pos) = split.iter().position(|&s| s == a) {
                        if mask >> pos & 1 == 1 {
                            ka = -ka;
                        }
                    }
                    ti[a] = fine.index_of_wavenumber(ka);
                }
                out.coeffs[c * flen + fine.flat(&ti)] += z / copies as f64;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::synth::random_field;

    #[test]
    fn identity_and_single_mode() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let f = random_field(g, 1, 2, 1.0, 3, false);
        assert_eq!(scaling_transform(&f, 1.0, 0.0).unwrap(), f);
        let mut s = SpectralField::zeros(g, 1);
        let i = g.flat(&[1, 2, 0]);
        s.coeffs[i] = Complex64::new(0.5, 0.25);
        let t = scaling_transform(&s, 2.0, -0.4).unwrap();
        let j = g.flat(&[2, 4, 0]);
        assert!((t.coeffs[j] - s.coeffs[i] * 2f64.powf(-0.4)).norm() < 1e-15);
        assert!(scaling_transform(&s, 3.0, 0.0).is_err());
        assert!(scaling_transform(&s, 0.5, 0.0).is_err());
        let big = random_field(g, 1, 2, 1.0, 7, false);
        assert_eq!(scaling_transform(&big, 2.0, 0.0), Err(SpectralError::Aliasing));
    }

    #[test]
    fn scaled_samples_match_physical_rescaling() {
        let g = TorusGrid::new(1, 32, 1.0).unwrap();
        let f = random_field(g, 1, 4, 1.0, 5, false);
        let t = scaling_transform(&f, 2.0, 0.5).unwrap().to_samples();
        let s = f.to_samples();
        for i in 0..g.len() {
            let want = 2f64.sqrt() * s[(2 * i) % g.len()];
            assert!((t[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn refine_keeps_coarse_samples() {
        let g = TorusGrid::new(2, 8, 2.0).unwrap();
        let s: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let f = SpectralField::from_samples(g, 1, &s).unwrap();
        let r = refine(&f, 2).unwrap();
        let rs = r.to_samples();
        for i in 0..g.len() {
            let c = g.coords(i);
            let j = r.grid.flat(&[2 * c[0], 2 * c[1], 0]);
            assert!((rs[j] - s[i]).abs() < 1e-12);
        }
        assert!(r.hermitian_defect() < 1e-14);
        assert!((r.l2_norm() - f.l2_norm()).abs() / f.l2_norm() < 0.5);
    }
}
