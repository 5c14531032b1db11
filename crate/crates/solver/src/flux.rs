//! The quadratic term `P div(u (x) v)`, pseudospectral with 2/3-rule dealiasing.

use crate::{Result, SolverError};
use spectral_core::{dealias, leray_project, Complex64, SpectralField};

fn check_vector(u: &SpectralField) -> Result<()> {
    if u.components != u.grid.dim {
        return Err(SolverError::InvalidInput(format!(
            "expected a {}-component vector field, got {}",
            u.grid.dim, u.components
        )));
    }
    Ok(())
}

/// `div(sum_k u_k (x) v_k)` with components `sum_j d_j (u_i v_j)`, dealiased, not projected.
pub fn flux_divergence_sum(pairs: &[(&SpectralField, &SpectralField)]) -> Result<SpectralField> {
    let (u0, _) = pairs.first().ok_or_else(|| SolverError::InvalidInput("no field pairs".into()))?;
    let g = u0.grid;
    let n = g.dim;
    let len = g.len();
    let mut prod = vec![0.0; n * n * len];
    for (u, v) in pairs {
        check_vector(u)?;
        check_vector(v)?;
        if u.grid != g || v.grid != g {
            return Err(SolverError::GridMismatch);
        }
        let us = dealias(u).to_samples();
        let vs = dealias(v).to_samples();
        for i in 0..n {
            for j in 0..n {
                let out = &mut prod[(i * n + j) * len..(i * n + j + 1) * len];
                let (a, b) = (&us[i * len..(i + 1) * len], &vs[j * len..(j + 1) * len]);
                for x in 0..len {
                    out[x] += a[x] * b[x];
                }
            }
        }
    }
    let t = dealias(&SpectralField::from_samples(g, n * n, &prod)?);
    let mut out = SpectralField::zeros(g, n);
    for idx in 0..len {
        let xi = g.xi_odd(idx);
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += t.coeffs[(i * n + j) * len + idx] * Complex64::new(0.0, xi[j]);
            }
            out.coeffs[i * len + idx] = acc;
        }
    }
    Ok(out)
}

/// `div(u (x) v)` before projection.
pub fn flux_divergence(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    flux_divergence_sum(&[(u, v)])
}

/// `P div(u (x) v)`.
pub fn nonlinear_flux(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    Ok(leray_project(&flux_divergence(u, v)?)?)
}

/// `P div(sum_k u_k (x) v_k)`.
pub fn nonlinear_flux_sum(pairs: &[(&SpectralField, &SpectralField)]) -> Result<SpectralField> {
    Ok(leray_project(&flux_divergence_sum(pairs)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::synth::random_field;
    use spectral_core::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_mean_free() {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        let z = SpectralField::zeros(g, 2);
        assert_eq!(nonlinear_flux(&z, &z).unwrap().max_coeff(), 0.0);
        let u = random_field(g, 2, 3, 1.0, 4, true);
        let f = nonlinear_flux(&u, &u).unwrap();
        assert!(f.coeffs[0].norm() < 1e-15 && f.coeffs[g.len()].norm() < 1e-15);
    }

    #[test]
    fn sum_is_additive() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let u = random_field(g, 2, 1, 1.0, 4, true);
        let v = random_field(g, 2, 2, 1.0, 4, true);
        let s = nonlinear_flux_sum(&[(&u, &v), (&v, &u)]).unwrap();
        let d = nonlinear_flux(&u, &v).unwrap().add(&nonlinear_flux(&v, &u).unwrap()).unwrap();
        assert!(s.sub(&d).unwrap().max_coeff() < 1e-13 * d.max_coeff());
    }
}
