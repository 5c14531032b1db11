use crate::fft::fft_nd;
use crate::grid::TorusGrid;
use crate::sum::KahanSum;
use crate::{Result, SpectralError};
use num_complex::Complex64;

/// Fourier coefficients of an `m`-component field, component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: TorusGrid,
    pub components: usize,
    pub coeffs: Vec<Complex64>,
    pub is_real: bool,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()],
            is_real: true,
        }
    }

    /// Forward transform of real samples (`components * N^n` values, component-major).
    pub fn from_samples(grid: TorusGrid, components: usize, samples: &[f64]) -> Result<Self> {
        let len = grid.len();
        if samples.len() != components * len || components == 0 {
            return Err(SpectralError::ShapeMismatch { expected: components.max(1) * len, got: samples.len() });
        }
        let scale = 1.0 / len as f64;
        let mut coeffs = Vec::with_capacity(samples.len());
        for c in 0..components {
            let mut buf: Vec<Complex64> =
                samples[c * len..(c + 1) * len].iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft_nd(&mut buf, grid.dim, grid.n(), true);
            coeffs.extend(buf.into_iter().map(|z| z * scale));
        }
        Ok(Self { grid, components, coeffs, is_real: true })
    }

    /// Physical samples; for real fields the imaginary round-off is discarded.
    pub fn to_samples(&self) -> Vec<f64> {
        let len = self.grid.len();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in 0..self.components {
            let mut buf = self.component(c).to_vec();
            fft_nd(&mut buf, self.grid.dim, self.grid.n(), false);
            out.extend(buf.iter().map(|z| z.re));
        }
        debug_assert_eq!(out.len(), self.components * len);
        out
    }

    /// Physical samples of one component, keeping imaginary parts.
    pub fn component_samples_complex(&self, c: usize) -> Vec<Complex64> {
        let mut buf = self.component(c).to_vec();
        fft_nd(&mut buf, self.grid.dim, self.grid.n(), false);
        buf
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Scalar field holding component `c`.
    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
            is_real: self.is_real,
        }
    }

    /// Stack scalar fields into one multi-component field.
    pub fn stack(parts: &[SpectralField]) -> Result<SpectralField> {
        let grid = parts.first().ok_or(SpectralError::InvalidParams("empty stack".into()))?.grid;
        let mut coeffs = Vec::new();
        let mut is_real = true;
        for p in parts {
            if p.grid != grid {
                return Err(SpectralError::GridMismatch);
            }
            coeffs.extend_from_slice(&p.coeffs);
            is_real &= p.is_real;
        }
        Ok(SpectralField { grid, components: coeffs.len() / grid.len(), coeffs, is_real })
    }

    /// Apply a per-mode multiplier `m(idx)` to every component.
    pub fn map_modes<F: Fn(usize) -> Complex64>(&self, m: F) -> SpectralField {
        let len = self.grid.len();
        let mult: Vec<Complex64> = (0..len).map(&m).collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, z)| z * mult[i % len])
            .collect();
        SpectralField { grid: self.grid, components: self.components, coeffs, is_real: self.is_real }
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(SpectralField {
            grid: self.grid,
            components: self.components,
            coeffs,
            is_real: self.is_real && other.is_real,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.add(&other.scale(-1.0))
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    /// Add a constant to every sample of every component.
    pub fn add_constant(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        let len = self.grid.len();
        for comp in 0..self.components {
            out.coeffs[comp * len] += c;
        }
        out
    }

    /// `L^2(torus)` norm via Parseval: `L^n sum |c_k|^2` over all components.
    pub fn l2_norm(&self) -> f64 {
        let vol = self.grid.period.powi(self.grid.dim as i32);
        let mut k = KahanSum::new();
        for z in &self.coeffs {
            k.add(z.norm_sqr());
        }
        (vol * k.value()).sqrt()
    }

    /// Spectral inner product `L^n sum conj(a_k) b_k`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.check_compatible(other)?;
        let vol = self.grid.period.powi(self.grid.dim as i32);
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let p = a.conj() * b;
            re.add(p.re);
            im.add(p.im);
        }
        Ok(Complex64::new(re.value(), im.value()) * vol)
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_k |c(-k) - conj(c(k))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = self.component(c);
            for idx in 0..self.grid.len() {
                let m = self.grid.mirror(idx);
                worst = worst.max((comp[m] - comp[idx].conj()).norm());
            }
        }
        worst / scale
    }

    /// Sup norm of the physical samples.
    pub fn sup_norm(&self) -> f64 {
        self.to_samples().iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Pointwise Euclidean magnitude over components, squared, at every sample.
    pub fn pointwise_sq_magnitude(&self) -> Vec<f64> {
        let len = self.grid.len();
        let s = self.to_samples();
        let mut out = vec![0.0; len];
        for c in 0..self.components {
            for (o, v) in out.iter_mut().zip(&s[c * len..(c + 1) * len]) {
                *o += v * v;
            }
        }
        out
    }
}

/// Forward transform; see [`SpectralField::from_samples`].
pub fn to_spectral(grid: TorusGrid, components: usize, samples: &[f64]) -> Result<SpectralField> {
    SpectralField::from_samples(grid, components, samples)
}

/// Inverse transform; see [`SpectralField::to_samples`].
pub fn to_physical(f: &SpectralField) -> Vec<f64> {
    f.to_samples()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, pts: usize) -> TorusGrid {
        TorusGrid::new(n, pts, 2.0).unwrap()
    }

    #[test]
    fn constant_has_only_dc() {
        let g = grid(2, 16);
        let f = SpectralField::from_samples(g, 1, &vec![1.0; g.len()]).unwrap();
        assert!((f.coeffs[0].re - 1.0).abs() < 1e-15);
        assert!(f.coeffs[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = grid(2, 16);
        let l = g.period;
        let s: Vec<f64> = (0..g.len()).map(|i| (2.0 * PI * g.position(i)[0] / l).cos()).collect();
        let f = SpectralField::from_samples(g, 1, &s).unwrap();
        let p = g.flat(&[1, 0, 0]);
        let m = g.flat(&[15, 0, 0]);
        for (idx, z) in f.coeffs.iter().enumerate() {
            if idx == p || idx == m {
                assert!((z.re - 0.5).abs() < 1e-14 && z.im.abs() < 1e-14);
            } else {
                assert!(z.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn direct_dft_oracle_at_n8() {
        // Independent O(N^{2n}) summation of the forward transform.
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        let s: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.4).collect();
        let f = SpectralField::from_samples(g, 1, &s).unwrap();
        for kidx in 0..g.len() {
            let k = g.k_vec(kidx);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..g.len() {
                let c = g.coords(j);
                let ph = -2.0 * PI * (k[0] as f64 * c[0] as f64 + k[1] as f64 * c[1] as f64) / 8.0;
                acc += Complex64::from_polar(s[j], ph);
            }
            acc /= g.len() as f64;
            assert!((acc - f.coeffs[kidx]).norm() < 1e-14);
        }
        let back = f.to_samples();
        let err = back.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(f.hermitian_defect() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let g = grid(1, 8);
        assert!(matches!(
            SpectralField::from_samples(g, 1, &[0.0; 7]),
            Err(SpectralError::ShapeMismatch { .. })
        ));
    }
}
