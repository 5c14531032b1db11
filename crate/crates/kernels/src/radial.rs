//! Radial moments `int_0^inf rho^p exp(-t rho^{2 beta}) w(rho r) d rho` for oscillatory `w`.

use crate::bessel::{bessel_j_all, spherical_triplet};
use crate::quad::{adaptive, wynn_epsilon};
use crate::{KernelError, Result};
use dashmap::DashMap;
use std::sync::{Arc, LazyLock};

/// Oscillatory factor family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Osc {
    /// `cos z`.
    Cos,
    /// `J_0(z) ..= J_m(z)`.
    Bessel(usize),
    /// `j_0(z), j_1(z)/z, j_2(z)`.
    Spherical,
}

impl Osc {
    pub fn channels(&self) -> usize {
        match self {
            Osc::Cos => 1,
            Osc::Bessel(m) => m + 1,
            Osc::Spherical => 3,
        }
    }

    fn eval(&self, z: f64, out: &mut [f64]) {
        match self {
            Osc::Cos => out[0] = z.cos(),
            Osc::Bessel(_) => bessel_j_all(z, out),
            Osc::Spherical => out.copy_from_slice(&spherical_triplet(z)),
        }
    }
}

/// Moment values and error estimates, indexed `[power_index * channels + channel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub channels: usize,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl Moments {
    pub fn get(&self, power_index: usize, channel: usize) -> f64 {
        self.values[power_index * self.channels + channel]
    }

    pub fn err(&self, power_index: usize, channel: usize) -> f64 {
        self.errors[power_index * self.channels + channel]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    osc: Osc,
    powers: Vec<u32>,
    beta: u64,
    t: u64,
    r: u64,
    tol: u64,
}

static CACHE: LazyLock<DashMap<Key, Arc<Moments>>> = LazyLock::new(DashMap::new);

/// Number of cached moment evaluations.
pub fn cache_len() -> usize {
    CACHE.len()
}

const MAX_PANELS: usize = 400_000;

/// Cached radial moments for every `p` in `powers` and every channel of `osc`.
pub fn radial_moments(osc: Osc, powers: &[u32], beta: f64, t: f64, r: f64, tol: f64) -> Result<Arc<Moments>> {
    if !(t > 0.0) || !(r >= 0.0) || !(beta > 0.0) || powers.is_empty() {
        return Err(KernelError::InvalidInput(format!("moments need t > 0, r >= 0 (t={t}, r={r})")));
    }
    let key = Key {
        osc,
        powers: powers.to_vec(),
        beta: beta.to_bits(),
        t: t.to_bits(),
        r: r.to_bits(),
        tol: tol.to_bits(),
    };
    if let Some(hit) = CACHE.get(&key) {
        return Ok(hit.clone());
    }
    let m = compute(osc, powers, beta, t, r, tol)?;
    let m = Arc::new(m);
    CACHE.entry(key).or_insert_with(|| m.clone());
    Ok(m)
}

fn envelope(p: f64, beta: f64, t: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return if p == 0.0 { 1.0 } else { 0.0 };
    }
    (p * rho.ln() - t * rho.powf(2.0 * beta)).exp()
}

fn compute(osc: Osc, powers: &[u32], beta: f64, t: f64, r: f64, tol: f64) -> Result<Moments> {
    let ch = osc.channels();
    let dim = ch * powers.len();
    let pmax = *powers.iter().max().unwrap() as f64;
    let scale = t.powf(-0.5 / beta);
    let peak_rho = (pmax / (2.0 * beta * t)).powf(0.5 / beta).max(scale);
    let peak = envelope(pmax, beta, t, peak_rho).max(1.0);
    let mut rho_max = peak_rho;
    while envelope(pmax, beta, t, rho_max) * rho_max.max(1.0) > 1e-17 * peak {
        rho_max *= 1.05;
    }
    let mut width = 0.5 * scale;
    if r > 0.0 {
        width = width.min(std::f64::consts::PI / r);
    }
    let panels = (rho_max / width).ceil() as usize;
    let (panels, truncated) = if panels > MAX_PANELS { (MAX_PANELS, true) } else { (panels, false) };
    let panel_tol = (tol / panels as f64).max(1e-17 * peak);
    let mut osc_buf = vec![0.0; ch];
    let mut f = |rho: f64, out: &mut [f64]| {
        osc.eval(rho * r, &mut osc_buf);
        for (pi, &p) in powers.iter().enumerate() {
            let e = envelope(p as f64, beta, t, rho);
            for c in 0..ch {
                out[pi * ch + c] = e * osc_buf[c];
            }
        }
    };
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut partial: Vec<Vec<f64>> = vec![Vec::new(); dim];
    for k in 0..panels {
        let a = k as f64 * width;
        let b = a + width;
        let (v, e) = adaptive(&mut f, a, b, dim, panel_tol, 400)
            .ok_or(KernelError::NonConvergence { r, t })?;
        for i in 0..dim {
            values[i] += v[i];
            errors[i] += e[i];
            if truncated && panels - k <= 24 {
                partial[i].push(values[i]);
            }
        }
    }
    if truncated {
        for i in 0..dim {
            let acc = wynn_epsilon(&partial[i]);
            errors[i] += (acc - values[i]).abs();
            values[i] = acc;
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(KernelError::NonConvergence { r, t });
    }
    Ok(Moments { channels: ch, values, errors })
}
