//! Exponential-integrator quadrature for `int_0^t exp(-(t - s) Lambda) f(s) ds`.
//!
//! The data are linear between consecutive nodes; against that interpolant the kernel is
//! integrated in closed form, cell by cell, with `Lambda = |xi|^{2 beta}` per mode.

use crate::flux::nonlinear_flux_sum;
use crate::{Result, SolverError};
use rayon::prelude::*;
use spectral_core::{leray_project, Complex64, FracParams, SpectralField, TimeGrid, TorusGrid};

const SERIES_CUTOFF: f64 = 0.5;

/// `int_0^1 exp(-z u) du` and `int_0^1 exp(-z u) u du`.
pub fn phi_weights(z: f64) -> (f64, f64) {
    if z < SERIES_CUTOFF {
        let (mut e1, mut psi) = (0.0, 0.0);
        let mut term = 1.0; // (-z)^k / k!
        for k in 0..24 {
            e1 += term / (k + 1) as f64;
            psi += term / (k + 2) as f64;
            term *= -z / (k + 1) as f64;
        }
        (e1, psi)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (1.0 - e * (1.0 + z)) / (z * z))
    }
}

/// Weights `(w_a, w_b)` with `int_a^b exp(-lam (b - s)) f(s) ds = w_a f(a) + w_b f(b)` for linear `f`.
pub fn cell_weights(lam: f64, h: f64) -> (f64, f64) {
    let (e1, psi) = phi_weights(lam * h);
    (h * psi, h * (e1 - psi))
}

/// `|xi|^{2 beta}` for every mode (zero at the mean).
pub fn symbol(grid: &TorusGrid, beta: f64) -> Vec<f64> {
    (0..grid.len()).map(|i| if i == 0 { 0.0 } else { grid.xi_norm(i).powf(2.0 * beta) }).collect()
}

/// `Y(s_m) = int_0^{s_m} exp(-(s_m - s) Lambda) f(s) ds` at every `s_m`, with `Y(s_0) = 0`.
pub fn semigroup_convolve(f: &[SpectralField], s: &[f64], beta: f64) -> Result<Vec<SpectralField>> {
    if f.len() != s.len() || f.is_empty() {
        return Err(SolverError::InvalidInput("one field per time point required".into()));
    }
    if s.windows(2).any(|w| !(w[1] > w[0])) || s[0] < 0.0 {
        return Err(SolverError::InvalidInput("time points must increase from s_0 >= 0".into()));
    }
    let g = f[0].grid;
    let len = g.len();
    let lam = symbol(&g, beta);
    let mut out = vec![SpectralField::zeros(g, f[0].components)];
    for m in 1..s.len() {
        let h = s[m] - s[m - 1];
        let prev = &out[m - 1];
        let mut y = SpectralField::zeros(g, f[0].components);
        for (idx, &l) in lam.iter().enumerate() {
            let decay = (-l * h).exp();
            let (wa, wb) = cell_weights(l, h);
            for c in 0..f[0].components {
                let k = c * len + idx;
                y.coeffs[k] = prev.coeffs[k] * decay + f[m - 1].coeffs[k] * wa + f[m].coeffs[k] * wb;
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// A vector field at `t = 0` and at every node of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: TimeGrid,
    /// `fields[0]` at `t = 0`, `fields[i + 1]` at `times.nodes[i]`.
    pub fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: TimeGrid, fields: Vec<SpectralField>) -> Result<Self> {
        if fields.len() != times.len() + 1 {
            return Err(SolverError::InvalidInput(format!(
                "{} fields for {} nodes plus t = 0",
                fields.len(),
                times.len()
            )));
        }
        Ok(Self { times, fields })
    }

    pub fn zeros(times: TimeGrid, grid: TorusGrid, components: usize) -> Self {
        let fields = vec![SpectralField::zeros(grid, components); times.len() + 1];
        Self { times, fields }
    }

    /// `exp(-t Lambda) a` at every time point.
    pub fn linear(a: &SpectralField, times: TimeGrid, beta: f64) -> Result<Self> {
        let mut fields = vec![a.clone()];
        for &t in &times.nodes {
            fields.push(spectral_core::heat_semigroup(a, t, beta)?);
        }
        Ok(Self { times, fields })
    }

    /// `0, t_1, ..., t_M`.
    pub fn points(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.times.nodes.iter().copied()).collect()
    }

    /// Fields at the grid nodes, without `t = 0`.
    pub fn node_fields(&self) -> &[SpectralField] {
        &self.fields[1..]
    }

    pub fn grid(&self) -> TorusGrid {
        self.fields[0].grid
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { times: self.times.clone(), fields: self.fields.iter().map(|f| f.scale(c)).collect() }
    }

    pub fn add(&self, other: &Trajectory) -> Result<Self> {
        self.check_same(other)?;
        let fields = self.fields.iter().zip(&other.fields).map(|(a, b)| a.add(b)).collect::<std::result::Result<_, _>>()?;
        Ok(Self { times: self.times.clone(), fields })
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Self> {
        self.check_same(other)?;
        let fields = self.fields.iter().zip(&other.fields).map(|(a, b)| a.sub(b)).collect::<std::result::Result<_, _>>()?;
        Ok(Self { times: self.times.clone(), fields })
    }

    fn check_same(&self, other: &Trajectory) -> Result<()> {
        if self.times != other.times || self.grid() != other.grid() {
            return Err(SolverError::GridMismatch);
        }
        Ok(())
    }

    /// Index into `fields` of the node at time `t`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        if t == 0.0 {
            return Ok(0);
        }
        self.times.index_of(t).map(|i| i + 1).ok_or(SolverError::NodeNotInGrid(t))
    }

    pub fn is_finite(&self) -> Option<usize> {
        self.fields.iter().position(|f| f.coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    }
}

/// `-int_0^t exp(-(t - s) Lambda) P div(sum_k u_k (x) v_k)(s) ds` at every time point.
pub fn bilinear_sum(pairs: &[(&Trajectory, &Trajectory)], p: &FracParams) -> Result<Trajectory> {
    let first = pairs.first().ok_or_else(|| SolverError::InvalidInput("no trajectory pairs".into()))?.0;
    for (u, v) in pairs {
        first.check_same(u)?;
        first.check_same(v)?;
    }
    let flux: Vec<SpectralField> = (0..first.fields.len())
        .into_par_iter()
        .map(|i| {
            let at: Vec<(&SpectralField, &SpectralField)> = pairs.iter().map(|(u, v)| (&u.fields[i], &v.fields[i])).collect();
            nonlinear_flux_sum(&at).map(|f| f.scale(-1.0))
        })
        .collect::<Result<_>>()?;
    let conv = semigroup_convolve(&flux, &first.points(), p.beta)?;
    let fields = conv.iter().map(leray_project).collect::<std::result::Result<_, _>>()?;
    Ok(Trajectory { times: first.times.clone(), fields })
}

/// `B(u, v)(t) = -int_0^t exp(-(t - s) Lambda) P div(u (x) v)(s) ds`.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory, p: &FracParams) -> Result<Trajectory> {
    bilinear_sum(&[(u, v)], p)
}

/// `B(u, v)` at one node time `t`.
pub fn bilinear_b_at(u: &Trajectory, v: &Trajectory, p: &FracParams, t: f64) -> Result<SpectralField> {
    let i = u.index_at(t)?;
    Ok(bilinear_b(u, v, p)?.fields.swap_remove(i))
}

/// Real part of the `L^2` pairing, used by energy diagnostics.
pub fn l2_pairing(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let z: Complex64 = a.inner(b)?;
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::synth::random_field;
    use std::f64::consts::PI;

    #[test]
    fn series_and_closed_form_agree_at_the_cutoff() {
        let z = SERIES_CUTOFF * (1.0 - 1e-12);
        let (a, b) = phi_weights(z);
        let e = (-z).exp();
        assert!((a - (1.0 - e) / z).abs() < 1e-14);
        assert!((b - (1.0 - e * (1.0 + z)) / (z * z)).abs() < 1e-14);
        assert_eq!(phi_weights(0.0), (1.0, 0.5));
    }

    #[test]
    fn constant_integrand_is_exact() {
        let g = TorusGrid::new(2, 8, 2.0 * PI).unwrap();
        let beta = 0.75;
        let mut f = SpectralField::zeros(g, 1);
        let idx = g.flat(&[2, 1, 0]);
        f.coeffs[idx] = Complex64::new(0.3, -0.2);
        let s: Vec<f64> = std::iter::once(0.0).chain((0..12).map(|i| 0.01 * 1.5f64.powi(i))).collect();
        let y = semigroup_convolve(&vec![f.clone(); s.len()], &s, beta).unwrap();
        let lam = g.xi_norm(idx).powf(2.0 * beta);
        for (m, &t) in s.iter().enumerate() {
            let want = f.coeffs[idx] * ((1.0 - (-lam * t).exp()) / lam);
            assert!((y[m].coeffs[idx] - want).norm() < 1e-12 * want.norm().max(1e-300));
        }
    }

    #[test]
    fn bilinear_is_zero_when_one_side_vanishes() {
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        let p = FracParams::new(0.3, 0.8).unwrap();
        let times = TimeGrid::geometric(1.0, 1.5, 8).unwrap();
        let u = Trajectory::linear(&random_field(g, 2, 1, 1.0, 4, true), times.clone(), p.beta).unwrap();
        let z = Trajectory::zeros(times, g, 2);
        let b = bilinear_b(&u, &z, &p).unwrap();
        assert!(b.fields.iter().all(|f| f.max_coeff() == 0.0));
        assert!(matches!(bilinear_b_at(&u, &z, &p, 0.123), Err(SolverError::NodeNotInGrid(_))));
    }
}
