//! Deterministic band-limited random fields.

use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::ops::leray_project;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Real field with `|c_k| = |k|^{-slope}` and uniform random phases on `0 < |k| <= kmax`.
///
/// Nyquist planes stay empty, so every mode has a distinct mirror. With `div_free`
/// (and `components == dim`) the result is Leray-projected.
pub fn random_field(
    grid: TorusGrid,
    components: usize,
    seed: u64,
    slope: f64,
    kmax: usize,
    div_free: bool,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, components);
    let len = grid.len();
    let nyq = (grid.n() / 2) as i64;
    let kmax2 = (kmax * kmax) as i64;
    for c in 0..components {
        for idx in 1..len {
            let m = grid.mirror(idx);
            if m < idx {
                continue;
            }
            let k = grid.k_vec(idx);
            if k[..grid.dim].iter().any(|&ka| ka.abs() == nyq) {
                continue;
            }
            let k2: i64 = k.iter().map(|x| x * x).sum();
            // Draw the phase for every candidate so the stream does not depend on kmax.
            let phase = rng.gen::<f64>() * 2.0 * PI;
            if k2 > kmax2 {
                continue;
            }
            let z = Complex64::from_polar((k2 as f64).sqrt().powf(-slope), phase);
            f.coeffs[c * len + idx] = z;
            f.coeffs[c * len + m] = z.conj();
        }
    }
    if div_free && components == grid.dim {
        leray_project(&f).expect("component count checked")
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::divergence_defect;

    #[test]
    fn reproducible_and_hermitian() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let a = random_field(g, 2, 5, 1.5, 8, true);
        let b = random_field(g, 2, 5, 1.5, 8, true);
        assert_eq!(a, b);
        assert!(a.hermitian_defect() < 1e-14);
        assert!(divergence_defect(&a).unwrap() < 1e-14);
        assert_ne!(a, random_field(g, 2, 6, 1.5, 8, true));
    }

    #[test]
    fn band_limit_respected() {
        let g = TorusGrid::new(1, 64, 1.0).unwrap();
        let f = random_field(g, 1, 1, 0.0, 5, false);
        for idx in 0..g.len() {
            let k = g.k_vec(idx)[0].abs();
            let on = f.coeffs[idx].norm() > 0.0;
            assert_eq!(on, k >= 1 && k <= 5, "k={k}");
        }
    }
}
