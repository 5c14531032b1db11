//! Pointwise-in-time PDE residual of a discrete trajectory.
//!
//! The time derivative at an interior point uses a three-point rule fitted per mode to
//! be exact on `1`, `t` and `exp(-lambda t)`, so free decay is differentiated exactly and
//! slowly varying forced modes to second order.

use crate::flux::nonlinear_flux;
use crate::integrator::{symbol, Trajectory};
use crate::{Result, SolverError};
use serde::Serialize;
use spectral_core::{FracParams, SpectralField};

/// Weights `(a, b, c)` of `u'(t_i) ~ a u(t_i - h1) + b u(t_i) + c u(t_i + h2)`.
pub fn fitted_weights(lam: f64, h1: f64, h2: f64) -> (f64, f64, f64) {
    let (z1, z2) = (lam * h1, lam * h2);
    let a = if lam == 0.0 {
        -h2 / (h1 * (h1 + h2))
    } else if z1.max(z2) < 0.5 {
        // a = -lam h2 g(z2) / (h1 D), both factors by series to avoid cancellation.
        let (mut g, mut d) = (0.0, 0.0);
        let (mut p1, mut p2, mut fact) = (1.0, 1.0, 1.0);
        for k in 0..30 {
            fact *= (k + 1) as f64;
            g += p2 / (fact * (k + 2) as f64);
            p1 *= z1;
            p2 *= -z2;
            d += (p1 - p2) / (fact * (k + 2) as f64);
        }
        -lam * h2 * g / (h1 * d)
    } else {
        let e1 = -(-z2).exp_m1() / z2;
        let num = -lam * (1.0 - e1);
        let den = lam * h1 * (z1.exp_m1() / z1 - e1);
        num / den
    };
    let c = (1.0 + a * h1) / h2;
    (a, -a - c, c)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// Interior time points.
    pub times: Vec<f64>,
    /// `||u_t + Lambda u + N(u)||_2` per interior point.
    pub absolute: Vec<f64>,
    /// `absolute / (||u_t|| + ||Lambda u|| + ||N(u)||)`.
    pub relative: Vec<f64>,
    pub max_relative: f64,
    pub nonlinear: bool,
}

/// Residual of `u_t + (-Delta)^beta u + P div(u (x) u)` at `t_1, ..., t_{M-1}`.
///
/// With `nonlinear = false` the quadratic term is dropped (checks of the linear evolution).
pub fn residual(u: &Trajectory, p: &FracParams, nonlinear: bool) -> Result<ResidualReport> {
    if u.times.len() < 3 {
        return Err(SolverError::InvalidInput(format!("residual needs at least 3 nodes, got {}", u.times.len())));
    }
    let g = u.grid();
    let len = g.len();
    let comps = u.fields[0].components;
    let lam = symbol(&g, p.beta);
    let pts = u.points();
    let mut rep = ResidualReport { times: Vec::new(), absolute: Vec::new(), relative: Vec::new(), max_relative: 0.0, nonlinear };
    for i in 1..pts.len() - 1 {
        let (h1, h2) = (pts[i] - pts[i - 1], pts[i + 1] - pts[i]);
        let (um, u0, up) = (&u.fields[i - 1], &u.fields[i], &u.fields[i + 1]);
        let mut dt = SpectralField::zeros(g, comps);
        let mut lu = SpectralField::zeros(g, comps);
        for (idx, &l) in lam.iter().enumerate() {
            let (a, b, c) = fitted_weights(l, h1, h2);
            for comp in 0..comps {
                let k = comp * len + idx;
                dt.coeffs[k] = um.coeffs[k] * a + u0.coeffs[k] * b + up.coeffs[k] * c;
                lu.coeffs[k] = u0.coeffs[k] * l;
            }
        }
        let n = if nonlinear { nonlinear_flux(u0, u0)? } else { SpectralField::zeros(g, comps) };
        let r = dt.add(&lu)?.add(&n)?;
        let abs = r.l2_norm();
        let scale = dt.l2_norm() + lu.l2_norm() + n.l2_norm();
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        rep.times.push(pts[i]);
        rep.absolute.push(abs);
        rep.relative.push(rel);
        rep.max_relative = rep.max_relative.max(rel);
    }
    debug_assert!(rep.absolute.iter().all(|x| x.is_finite()));
    Ok(rep)
}
