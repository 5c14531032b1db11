//! Radial profiles of the fractional heat kernel and the Oseen tensor.

use crate::radial::{radial_moments, Osc};
use crate::{KernelError, Result};
use serde::Serialize;
use libm::tgamma as gamma;
use std::f64::consts::PI;

/// Absolute quadrature tolerance used by all profile evaluations.
pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileKind {
    Heat,
    /// Component `(j, l)` of the Oseen tensor along the first axis.
    Oseen { j: usize, l: usize },
    /// Frobenius norm of `d^k` of the Oseen tensor along the first axis.
    OseenDerivative { order: usize },
    /// Frobenius norm of `d^k P grad K` along the first axis.
    ProjectedGradient { order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileParams {
    pub n: usize,
    pub beta: f64,
    pub t: f64,
    pub kind: ProfileKind,
}

/// Sampled radial function with per-sample quadrature error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub params: ProfileParams,
}

impl RadialProfile {
    pub(crate) fn new(radii: &[f64], values: Vec<f64>, errors: Vec<f64>, params: ProfileParams) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonConvergence { r: f64::NAN, t: params.t });
        }
        Ok(Self { radii: radii.to_vec(), values, errors, params })
    }

    /// Largest absolute value over the sampled radii.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// CSV with header `r,value,abs_error_estimate`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value,abs_error_estimate\n");
        for i in 0..self.radii.len() {
            s.push_str(&format!("{:e},{:e},{:e}\n", self.radii[i], self.values[i], self.errors[i]));
        }
        s
    }

    /// Local log-log slopes between consecutive samples.
    pub fn log_slopes(&self) -> Vec<f64> {
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| (v[1].abs().ln() - v[0].abs().ln()) / (r[1].ln() - r[0].ln()))
            .collect()
    }
}

pub(crate) fn check_common(n: usize, beta: f64, t: f64, radii: &[f64]) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(KernelError::InvalidInput(format!("dimension {n} not in 1..=3")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(KernelError::InvalidInput(format!("time {t} must be positive")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(KernelError::InvalidInput(format!("beta {beta} outside (0, 1]")));
    }
    if radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KernelError::InvalidInput("radii must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

/// `K^beta_t(r)` by radial Fourier inversion.
pub fn heat_kernel_profile(n: usize, beta: f64, t: f64, radii: &[f64]) -> Result<RadialProfile> {
    check_common(n, beta, t, radii)?;
    let mut values = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        let (v, e) = heat_value(n, beta, t, r)?;
        values.push(v);
        errors.push(e);
    }
    RadialProfile::new(radii, values, errors, ProfileParams { n, beta, t, kind: ProfileKind::Heat })
}

fn heat_value(n: usize, beta: f64, t: f64, r: f64) -> Result<(f64, f64)> {
    let (osc, p, c) = match n {
        1 => (Osc::Cos, 0, 1.0 / PI),
        2 => (Osc::Bessel(0), 1, 1.0 / (2.0 * PI)),
        _ => (Osc::Spherical, 2, 1.0 / (2.0 * PI * PI)),
    };
    let m = radial_moments(osc, &[p], beta, t, r, TOL / c)?;
    Ok((c * m.get(0, 0), c * m.err(0, 0)))
}

/// Scalar coefficients `A, B` with `O_{jl}(x) = (2 pi)^{-n} (A delta_{jl} + B xhat_j xhat_l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OseenParts {
    pub radii: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub errors: Vec<f64>,
    pub n: usize,
}

impl OseenParts {
    pub fn component(&self, i: usize, j: usize, l: usize, xhat: &[f64]) -> f64 {
        let d = if j == l { 1.0 } else { 0.0 };
        (2.0 * PI).powi(-(self.n as i32)) * (self.a[i] * d + self.b[i] * xhat[j] * xhat[l])
    }

    /// `sum_j O_{jj}`.
    pub fn trace(&self, i: usize) -> f64 {
        (2.0 * PI).powi(-(self.n as i32)) * (self.n as f64 * self.a[i] + self.b[i])
    }
}

/// Radial/angular split of the Oseen tensor with multiplier `xi_j xi_l / |xi|^2 exp(-t |xi|^{2 beta})`.
pub fn oseen_parts(n: usize, beta: f64, t: f64, radii: &[f64]) -> Result<OseenParts> {
    check_common(n, beta, t, radii)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut errors = Vec::new();
    let norm = (2.0 * PI).powi(n as i32);
    for &r in radii {
        match n {
            1 => {
                let m = radial_moments(Osc::Cos, &[0], beta, t, r, TOL * norm / 2.0)?;
                a.push(2.0 * m.get(0, 0));
                b.push(0.0);
                errors.push(2.0 * m.err(0, 0) / norm);
            }
            2 => {
                let m = radial_moments(Osc::Bessel(2), &[1], beta, t, r, TOL * norm / (2.0 * PI))?;
                a.push(PI * (m.get(0, 0) + m.get(0, 2)));
                b.push(-2.0 * PI * m.get(0, 2));
                errors.push(2.0 * PI * (m.err(0, 0) + m.err(0, 2)) / norm);
            }
            _ => {
                let m = radial_moments(Osc::Spherical, &[2], beta, t, r, TOL * norm / (4.0 * PI))?;
                a.push(4.0 * PI * m.get(0, 1));
                b.push(-4.0 * PI * m.get(0, 2));
                errors.push(4.0 * PI * (m.err(0, 1) + m.err(0, 2)) / norm);
            }
        }
    }
    Ok(OseenParts { radii: radii.to_vec(), a, b, errors, n })
}

/// Oseen profile along the first axis: component `(j, l)` for `deriv_order = 0`, otherwise
/// the Frobenius norm of `d^k O_{jl}` over all ordered derivative tuples (`n = 2` only).
pub fn oseen_kernel_profile(
    n: usize,
    beta: f64,
    t: f64,
    j: usize,
    l: usize,
    deriv_order: usize,
    radii: &[f64],
) -> Result<RadialProfile> {
    check_common(n, beta, t, radii)?;
    if j >= n || l >= n {
        return Err(KernelError::InvalidInput(format!("component ({j},{l}) out of range for n = {n}")));
    }
    if deriv_order == 0 {
        let parts = oseen_parts(n, beta, t, radii)?;
        let mut xhat = [0.0; 3];
        xhat[0] = 1.0;
        let values = (0..radii.len()).map(|i| parts.component(i, j, l, &xhat)).collect();
        return RadialProfile::new(
            radii,
            values,
            parts.errors.clone(),
            ProfileParams { n, beta, t, kind: ProfileKind::Oseen { j, l } },
        );
    }
    if n != 2 {
        return Err(KernelError::Unsupported(format!("derivative profiles need n = 2, got n = {n}")));
    }
    crate::tensor2d::oseen_derivative_profile(beta, t, j, l, deriv_order, radii)
}

/// `int_{R^n} K^beta_t`: radial quadrature of the profile on `[0, r_cut]` plus the
/// large-`r` expansion beyond. Returns `(mass, tail_part)`.
pub fn total_mass(n: usize, beta: f64, t: f64, r_cut: f64, panels: usize) -> Result<(f64, f64)> {
    check_common(n, beta, t, &[r_cut])?;
    let sphere = match n {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    };
    let (x, w) = spectral_core::halfspace::gauss_legendre(12);
    let h = r_cut / panels as f64;
    let mut acc = spectral_core::KahanSum::new();
    for p in 0..panels {
        let c = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let r = c + 0.5 * h * xi;
            let (v, _) = heat_value(n, beta, t, r)?;
            acc.add(0.5 * h * wi * v * sphere * r.powi(n as i32 - 1));
        }
    }
    // Term by term: int_R^inf c_k r^{-n-2 beta k} |S| r^{n-1} dr = |S| c_k R^{-2 beta k} / (2 beta k).
    let mut tail = 0.0;
    for (k, c) in tail_coefficients(n, beta, t, 12).into_iter().enumerate() {
        let k = (k + 1) as f64;
        tail += sphere * c * r_cut.powf(-2.0 * beta * k) / (2.0 * beta * k);
    }
    Ok((acc.value() + tail, tail))
}

/// Coefficients `c_k` of `K^beta_t(x) ~ sum_k c_k |x|^{-n-2 beta k}` for large `|x|`
/// (all zero at `beta = 1`).
pub fn tail_coefficients(n: usize, beta: f64, t: f64, terms: usize) -> Vec<f64> {
    let a = 2.0 * beta;
    let nh = n as f64 / 2.0;
    (1..=terms)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let s = (PI * kf * a / 2.0).sin();
            if beta == 1.0 {
                return 0.0;
            }
            sign / factorial(k) * 2f64.powf(kf * a) / PI.powf(nh + 1.0)
                * gamma(kf * a / 2.0 + 1.0)
                * gamma((kf * a + n as f64) / 2.0)
                * s
                * t.powf(kf)
        })
        .collect()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `sum_m K^beta_t(x + m L)` on `[0, L)` for `n = 1`, with the images beyond `images`
/// replaced by the leading large-`r` term.
pub fn periodized_heat_kernel_1d(beta: f64, t: f64, period: f64, xs: &[f64], images: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len());
    let c1 = tail_coefficients(1, beta, t, 1)[0];
    for &x in xs {
        let mut s = spectral_core::KahanSum::new();
        for m in -(images as i64)..=(images as i64) {
            let r = (x + m as f64 * period).abs();
            s.add(heat_value(1, beta, t, r)?.0);
        }
        if c1 != 0.0 {
            // Far images: sum_{m > M} c1 (|mL +- x|)^{-1-2beta}, via the Euler-Maclaurin integral.
            let e = 1.0 + 2.0 * beta;
            for sgn in [1.0, -1.0] {
                let start = (images as f64 + 0.5) * period + sgn * x;
                s.add(c1 * start.powf(1.0 - e) / ((e - 1.0) * period));
            }
        }
        out.push(s.value());
    }
    Ok(out)
}
