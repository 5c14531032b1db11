use crate::{Result, SpectralError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform periodic grid with `N` points per axis on `[0, L)^n`.
///
/// Flat indices are row-major with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub dim: usize,
    pub points_per_axis: usize,
    pub period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(SpectralError::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!(
                "points per axis {points_per_axis} must be a power of two >= 8"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(SpectralError::InvalidGrid(format!("period {period} must be positive")));
        }
        Ok(Self { dim, points_per_axis, period })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.points_per_axis
    }

    /// Number of physical samples, `N^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `h = L / N`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.period / self.points_per_axis as f64
    }

    /// Volume element `h^n` of the rectangle rule.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed wavenumber of a per-axis index: `-N/2 < k <= N/2`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Per-axis index of a signed wavenumber (taken modulo `N`).
    #[inline]
    pub fn index_of_wavenumber(&self, k: i64) -> usize {
        k.rem_euclid(self.points_per_axis as i64) as usize
    }

    /// Per-axis indices of a flat index; unused axes are zero.
    #[inline]
    pub fn coords(&self, mut idx: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut c = [0usize; 3];
        for a in (0..self.dim).rev() {
            c[a] = idx % n;
            idx /= n;
        }
        c
    }

    #[inline]
    pub fn flat(&self, c: &[usize; 3]) -> usize {
        let n = self.points_per_axis;
        let mut idx = 0;
        for &ci in c.iter().take(self.dim) {
            idx = idx * n + ci;
        }
        idx
    }

    /// Flat index of `c + d` with periodic wrap.
    #[inline]
    pub fn flat_wrapped(&self, c: &[i64; 3]) -> usize {
        let n = self.points_per_axis as i64;
        let mut idx = 0usize;
        for &ci in c.iter().take(self.dim) {
            idx = idx * self.points_per_axis + ci.rem_euclid(n) as usize;
        }
        idx
    }

    /// Wavevector `k` of a flat spectral index.
    #[inline]
    pub fn k_vec(&self, idx: usize) -> [i64; 3] {
        let c = self.coords(idx);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(c[a]);
        }
        k
    }

    #[inline]
    fn freq_unit(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Physical frequency `xi = 2 pi k / L`.
    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let k = self.k_vec(idx);
        let u = self.freq_unit();
        [k[0] as f64 * u, k[1] as f64 * u, k[2] as f64 * u]
    }

    /// Frequency used by odd multipliers: the Nyquist component is set to zero.
    #[inline]
    pub fn xi_odd(&self, idx: usize) -> [f64; 3] {
        let k = self.k_vec(idx);
        let u = self.freq_unit();
        let nyq = (self.points_per_axis / 2) as i64;
        let mut out = [0.0; 3];
        for a in 0..self.dim {
            if k[a] != nyq {
                out[a] = k[a] as f64 * u;
            }
        }
        out
    }

    /// `|xi|` of a flat spectral index.
    #[inline]
    pub fn xi_norm(&self, idx: usize) -> f64 {
        let x = self.xi(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Flat index of the wavevector `-k`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let c = self.coords(idx);
        let n = self.points_per_axis;
        let mut m = [0usize; 3];
        for a in 0..self.dim {
            m[a] = (n - c[a]) % n;
        }
        self.flat(&m)
    }

    /// Physical position of a flat sample index.
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let h = self.spacing();
        [c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h]
    }

    /// Smallest nonzero `|xi|`.
    pub fn xi_min(&self) -> f64 {
        self.freq_unit()
    }

    /// Largest `|xi|` on the grid (corner Nyquist mode).
    pub fn xi_max(&self) -> f64 {
        self.freq_unit() * (self.points_per_axis / 2) as f64 * (self.dim as f64).sqrt()
    }

    /// Minimal-image squared distance between two sample indices, in index units.
    #[inline]
    pub fn periodic_index_dist2(&self, a: usize, b: usize) -> i64 {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let n = self.points_per_axis as i64;
        let mut d2 = 0i64;
        for ax in 0..self.dim {
            let mut d = (ca[ax] as i64 - cb[ax] as i64).rem_euclid(n);
            if d > n / 2 {
                d -= n;
            }
            d2 += d * d;
        }
        d2
    }

    /// Same geometry with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dim, self.points_per_axis * factor, self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::new(4, 16, 1.0).is_err());
        assert!(TorusGrid::new(2, 12, 1.0).is_err());
        assert!(TorusGrid::new(2, 4, 1.0).is_err());
        assert!(TorusGrid::new(2, 16, 0.0).is_err());
    }

    #[test]
    fn wavenumber_range() {
        let g = TorusGrid::new(1, 8, 1.0).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        for i in 0..8 {
            assert_eq!(g.index_of_wavenumber(g.wavenumber(i)), i);
        }
    }

    #[test]
    fn coords_roundtrip_and_mirror() {
        let g = TorusGrid::new(3, 8, 2.0).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.flat(&g.coords(idx)), idx);
            let m = g.mirror(idx);
            assert_eq!(g.mirror(m), idx);
            let k = g.k_vec(idx);
            let km = g.k_vec(m);
            for a in 0..3 {
                let nyq = 4;
                if k[a] != nyq {
                    assert_eq!(km[a], -k[a]);
                }
            }
        }
    }

    #[test]
    fn odd_frequency_drops_nyquist() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        let idx = g.flat(&[4, 1, 0]);
        let x = g.xi_odd(idx);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 2.0 * PI).abs() < 1e-15);
    }
}
