//! Planar tensor kernels via the Jacobi-Anger expansion of the angular factor.

use crate::profile::{check_common, ProfileKind, ProfileParams, RadialProfile, TOL};
use crate::radial::{radial_moments, Osc};
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;

const ANGLES: usize = 32;
const MAX_DEG: usize = 15;

/// Fourier coefficients `a_m`, `m = -15..=15`, of a trigonometric polynomial in `theta`.
fn angular_coeffs<A: Fn(f64, f64) -> f64>(a: &A) -> Vec<Complex64> {
    let samples: Vec<f64> = (0..ANGLES)
        .map(|q| {
            let th = 2.0 * PI * q as f64 / ANGLES as f64;
            a(th.cos(), th.sin())
        })
        .collect();
    (-(MAX_DEG as i64)..=MAX_DEG as i64)
        .map(|m| {
            let mut s = Complex64::new(0.0, 0.0);
            for (q, v) in samples.iter().enumerate() {
                let th = 2.0 * PI * q as f64 / ANGLES as f64;
                s += Complex64::from_polar(*v, -(m as f64) * th);
            }
            s / ANGLES as f64
        })
        .collect()
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Value on the positive first axis of the kernel with multiplier
/// `i^s |xi|^p A(xi/|xi|) exp(-t |xi|^{2 beta})`, given the moments `I_m` for `m = 0..=deg`.
fn axis_value(coeffs: &[Complex64], s: i64, moments: &[f64]) -> f64 {
    let deg = moments.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, a) in coeffs.iter().enumerate() {
        let m = idx as i64 - MAX_DEG as i64;
        if m.unsigned_abs() as usize > deg || a.norm() < 1e-15 {
            continue;
        }
        let jm = if m < 0 && m % 2 != 0 { -moments[m.unsigned_abs() as usize] } else { moments[m.unsigned_abs() as usize] };
        acc += i_pow(s + m) * a * jm;
    }
    acc.re / (2.0 * PI)
}

fn tuples(k: usize) -> Vec<Vec<usize>> {
    (0..1usize << k).map(|mask| (0..k).map(|b| (mask >> b) & 1).collect()).collect()
}

fn frobenius_profile<C>(
    beta: f64,
    t: f64,
    power: u32,
    s: i64,
    deg: usize,
    components: &[C],
    radii: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)>
where
    C: Fn(f64, f64) -> f64,
{
    let coeffs: Vec<Vec<Complex64>> = components.iter().map(angular_coeffs).collect();
    let mut values = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = radial_moments(Osc::Bessel(deg), &[power], beta, t, r, TOL)?;
        let mom: Vec<f64> = (0..=deg).map(|c| m.get(0, c)).collect();
        let err: f64 = (0..=deg).map(|c| m.err(0, c)).sum();
        let mut sq = 0.0;
        for c in &coeffs {
            sq += axis_value(c, s, &mom).powi(2);
        }
        values.push(sq.sqrt());
        errors.push(err * (components.len() as f64).sqrt() / (2.0 * PI));
    }
    Ok((values, errors))
}

fn unit(v: usize, c: f64, s: f64) -> f64 {
    if v == 0 {
        c
    } else {
        s
    }
}

/// Frobenius norm over ordered `k`-tuples of `d^k O_{jl}` along the first axis.
pub fn oseen_derivative_profile(
    beta: f64,
    t: f64,
    j: usize,
    l: usize,
    k: usize,
    radii: &[f64],
) -> Result<RadialProfile> {
    check_common(2, beta, t, radii)?;
    let comps: Vec<_> = tuples(k)
        .into_iter()
        .map(|tup| {
            move |c: f64, s: f64| tup.iter().map(|&a| unit(a, c, s)).product::<f64>() * unit(j, c, s) * unit(l, c, s)
        })
        .collect();
    let (values, errors) = frobenius_profile(beta, t, k as u32 + 1, k as i64, k + 2, &comps, radii)?;
    RadialProfile::new(
        radii,
        values,
        errors,
        ProfileParams { n: 2, beta, t, kind: ProfileKind::OseenDerivative { order: k } },
    )
}

/// Frobenius norm of the full tensor `d^k P grad K^beta_t` (indices: `k` derivatives, `j`, `l`, `m`
/// of `P_{jl} d_m K`) along the first axis, `n = 2`.
pub fn projected_gradient_profile(beta: f64, t: f64, k: usize, radii: &[f64]) -> Result<RadialProfile> {
    check_common(2, beta, t, radii)?;
    let mut comps = Vec::new();
    for tup in tuples(k) {
        for j in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    let tup = tup.clone();
                    comps.push(move |c: f64, s: f64| {
                        let d = if j == l { 1.0 } else { 0.0 };
                        tup.iter().map(|&a| unit(a, c, s)).product::<f64>()
                            * (d - unit(j, c, s) * unit(l, c, s))
                            * unit(m, c, s)
                    });
                }
            }
        }
    }
    // Radial measure rho d rho adds one power to |xi|^{k+1}.
    let (values, errors) = frobenius_profile(beta, t, k as u32 + 2, k as i64 + 1, k + 3, &comps, radii)?;
    RadialProfile::new(
        radii,
        values,
        errors,
        ProfileParams { n: 2, beta, t, kind: ProfileKind::ProjectedGradient { order: k } },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{heat_kernel_profile, oseen_kernel_profile};

    #[test]
    fn angular_coefficients_of_cos_squared() {
        let a = angular_coeffs(&|c: f64, _s: f64| c * c);
        let at = |m: i64| a[(m + MAX_DEG as i64) as usize];
        assert!((at(0).re - 0.5).abs() < 1e-15);
        assert!((at(2).re - 0.25).abs() < 1e-15 && (at(-2).re - 0.25).abs() < 1e-15);
        assert!(at(1).norm() < 1e-15);
    }

    #[test]
    fn zeroth_order_reduces_to_scalar_paths() {
        let radii = [0.0, 0.7, 2.5];
        // Oseen (0,0) with no derivatives equals |O_00| from the A/B split.
        let d = oseen_derivative_profile(0.8, 1.0, 0, 0, 0, &radii).unwrap();
        let o = oseen_kernel_profile(2, 0.8, 1.0, 0, 0, 0, &radii).unwrap();
        for i in 0..3 {
            assert!((d.values[i] - o.values[i].abs()).abs() < 1e-11);
        }
        // Isotropic angular factor reproduces the heat kernel.
        let comps = [|_c: f64, _s: f64| 1.0];
        let (v, _) = frobenius_profile(0.8, 1.0, 1, 0, 0, &comps, &radii).unwrap();
        let h = heat_kernel_profile(2, 0.8, 1.0, &radii).unwrap();
        for i in 0..3 {
            assert!((v[i] - h.values[i].abs()).abs() < 1e-12);
        }
    }
}
