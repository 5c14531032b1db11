//! Fourier multipliers on [`SpectralField`]s.

use crate::field::SpectralField;
use crate::{Result, SpectralError};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(-Delta)^s`: multiplier `|xi|^{2s}`. The mean mode is kept for `s = 0` and zeroed otherwise.
pub fn frac_laplacian(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    let g = f.grid;
    f.map_modes(|idx| {
        if idx == 0 {
            ZERO
        } else {
            Complex64::new(g.xi_norm(idx).powf(2.0 * s), 0.0)
        }
    })
}

/// `exp(-t (-Delta)^beta)`: multiplier `exp(-t |xi|^{2 beta})`.
pub fn heat_semigroup(f: &SpectralField, t: f64, beta: f64) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(SpectralError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let g = f.grid;
    Ok(f.map_modes(|idx| Complex64::new((-t * g.xi_norm(idx).powf(2.0 * beta)).exp(), 0.0)))
}

fn require_vector(u: &SpectralField) -> Result<()> {
    if u.components != u.grid.dim {
        return Err(SpectralError::NotVector { expected: u.grid.dim, got: u.components });
    }
    Ok(())
}

/// Leray projection `u - xi (xi . u) / |xi|^2` per mode; the mean mode is unchanged.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    require_vector(u)?;
    let g = u.grid;
    let n = g.dim;
    let len = g.len();
    let mut out = u.clone();
    for idx in 1..len {
        let xi = g.xi_odd(idx);
        let x2: f64 = xi[..n].iter().map(|x| x * x).sum();
        if x2 == 0.0 {
            continue;
        }
        let mut dot = ZERO;
        for a in 0..n {
            dot += u.coeffs[a * len + idx] * xi[a];
        }
        for a in 0..n {
            out.coeffs[a * len + idx] -= dot * (xi[a] / x2);
        }
    }
    Ok(out)
}

/// `d/dx_axis`: multiplier `i xi_axis` (zero on the Nyquist plane of that axis).
pub fn partial_derivative(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    if axis >= f.grid.dim {
        return Err(SpectralError::AxisOutOfRange { axis, dim: f.grid.dim });
    }
    let g = f.grid;
    Ok(f.map_modes(|idx| Complex64::new(0.0, g.xi_odd(idx)[axis])))
}

/// `d^gamma` for a multi-index `gamma` (one entry per axis).
pub fn multi_derivative(f: &SpectralField, gamma: &[usize]) -> Result<SpectralField> {
    if gamma.len() != f.grid.dim {
        return Err(SpectralError::AxisOutOfRange { axis: gamma.len(), dim: f.grid.dim });
    }
    let g = f.grid;
    Ok(f.map_modes(|idx| {
        let xi = g.xi_odd(idx);
        let mut m = Complex64::new(1.0, 0.0);
        for (a, &p) in gamma.iter().enumerate() {
            for _ in 0..p {
                m *= Complex64::new(0.0, xi[a]);
            }
        }
        m
    }))
}

/// Divergence of a vector field.
pub fn divergence(u: &SpectralField) -> Result<SpectralField> {
    require_vector(u)?;
    let g = u.grid;
    let len = g.len();
    let mut out = SpectralField::zeros(g, 1);
    out.is_real = u.is_real;
    for idx in 0..len {
        let xi = g.xi_odd(idx);
        let mut acc = ZERO;
        for a in 0..g.dim {
            acc += u.coeffs[a * len + idx] * Complex64::new(0.0, xi[a]);
        }
        out.coeffs[idx] = acc;
    }
    Ok(out)
}

/// All multi-indices of order `k` in `n` variables, in lexicographic order.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n - 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(n, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// `max_{|gamma| = k} || d^gamma f ||_inf` over all components, from physical samples.
pub fn grad_tensor_norms(f: &SpectralField, k: usize) -> f64 {
    multi_indices(f.grid.dim, k)
        .iter()
        .map(|gamma| multi_derivative(f, gamma).expect("multi-index sized to grid").sup_norm())
        .fold(0.0, f64::max)
}

/// 2/3-rule truncation: zero every mode with some `|k_a| > N/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = f.grid;
    let cut = (g.n() / 3) as i64;
    f.map_modes(|idx| {
        let k = g.k_vec(idx);
        if k[..g.dim].iter().any(|&ka| ka.abs() > cut) {
            ZERO
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Spectral divergence residual `max_k |xi . u_k|` relative to `max |u_k|`.
pub fn divergence_defect(u: &SpectralField) -> Result<f64> {
    let d = divergence(u)?;
    let scale = u.max_coeff();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(d.max_coeff() / (scale * u.grid.xi_max().max(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::synth::random_field;
    use std::f64::consts::PI;

    fn g2() -> TorusGrid {
        TorusGrid::new(2, 16, 2.0 * PI).unwrap()
    }

    #[test]
    fn zeroth_power_is_identity_and_mean_convention() {
        let f = random_field(g2(), 1, 3, 1.0, 5, false).add_constant(2.0);
        assert_eq!(frac_laplacian(&f, 0.0), f);
        assert_eq!(frac_laplacian(&f, 0.7).coeffs[0], ZERO);
        assert_eq!(frac_laplacian(&f, -0.5).coeffs[0], ZERO);
    }

    #[test]
    fn laplacian_matches_second_differences_as_grid_refines() {
        // (-Delta) f against the 5-point stencil on refined grids: error falls like h^2.
        let mut errs = Vec::new();
        for &n in &[16usize, 32, 64] {
            let g = TorusGrid::new(2, n, 2.0 * PI).unwrap();
            let s: Vec<f64> = (0..g.len())
                .map(|i| {
                    let p = g.position(i);
                    (p[0].sin() * 2.0 * p[1].cos()).exp()
                })
                .collect();
            let f = SpectralField::from_samples(g, 1, &s).unwrap();
            let lap = frac_laplacian(&f, 1.0).to_samples();
            let h = g.spacing();
            let mut err: f64 = 0.0;
            for i in 0..g.len() {
                let c = g.coords(i);
                let ci = [c[0] as i64, c[1] as i64, 0];
                let nb = |d0: i64, d1: i64| s[g.flat_wrapped(&[ci[0] + d0, ci[1] + d1, 0])];
                let fd = -(nb(1, 0) + nb(-1, 0) + nb(0, 1) + nb(0, -1) - 4.0 * s[i]) / (h * h);
                err = err.max((fd - lap[i]).abs());
            }
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn heat_single_mode_amplitude() {
        let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
        let mut f = SpectralField::zeros(g, 1);
        f.coeffs[1] = Complex64::new(1.0, 0.0);
        let h = heat_semigroup(&f, 1.0, 1.0).unwrap();
        assert!((h.coeffs[1].re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(heat_semigroup(&f, -1.0, 0.8).is_err());
        assert_eq!(heat_semigroup(&f, 0.0, 0.8).unwrap(), f);
    }

    #[test]
    fn leray_annihilates_gradients_and_fixes_solenoidal() {
        let g = g2();
        let p = random_field(g, 1, 7, 1.0, 6, false);
        let grad = SpectralField::stack(&[
            partial_derivative(&p, 0).unwrap(),
            partial_derivative(&p, 1).unwrap(),
        ])
        .unwrap();
        let pg = leray_project(&grad).unwrap();
        assert!(pg.max_coeff() <= 1e-12 * grad.max_coeff());
        let u = random_field(g, 2, 9, 1.0, 6, true);
        let pu = leray_project(&u).unwrap();
        assert!(pu.sub(&u).unwrap().max_coeff() <= 1e-12 * u.max_coeff());
        assert!(divergence_defect(&pu).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_cosine() {
        let g = TorusGrid::new(1, 32, 3.0).unwrap();
        let l = g.period;
        let s: Vec<f64> = (0..g.len()).map(|i| (2.0 * PI * g.position(i)[0] / l).cos()).collect();
        let f = SpectralField::from_samples(g, 1, &s).unwrap();
        let d = partial_derivative(&f, 0).unwrap().to_samples();
        for i in 0..g.len() {
            let want = -(2.0 * PI / l) * (2.0 * PI * g.position(i)[0] / l).sin();
            assert!((d[i] - want).abs() < 1e-12);
        }
        assert!(partial_derivative(&f, 1).is_err());
        assert!((grad_tensor_norms(&f, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(1, 4), vec![vec![4]]);
    }
}
