//! Littlewood-Paley blocks and homogeneous Besov norms.

use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::sum::KahanSum;
use crate::{Result, SpectralError};
use num_complex::Complex64;

/// Smooth bump in `u = log2 |xi|`, supported on `|u| < 1`.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Dyadic windows `phi_j(xi) = phi_0(2^-j xi)` with `supp phi_0 = {1/2 < |xi| < 2}`,
/// normalized by the full sum over all integer levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LittlewoodPaleyBank {
    pub grid: TorusGrid,
    pub j_min: i32,
    pub j_max: i32,
}

impl LittlewoodPaleyBank {
    pub fn new(grid: TorusGrid) -> Self {
        let u_min = grid.xi_min().log2();
        let u_max = grid.xi_max().log2();
        let j_min = (u_min - 1.0).floor() as i32 + 1;
        let j_max = (u_max + 1.0).ceil() as i32 - 1;
        Self { grid, j_min, j_max }
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// Raw window `phi_j(xi)`.
    pub fn phi(&self, j: i32, xi_norm: f64) -> f64 {
        if xi_norm <= 0.0 {
            return 0.0;
        }
        bump(xi_norm.log2() - j as f64)
    }

    /// Normalized window `Psi_j(xi) = phi_j / sum_i phi_i`.
    pub fn psi(&self, j: i32, xi_norm: f64) -> f64 {
        if xi_norm <= 0.0 {
            return 0.0;
        }
        let u = xi_norm.log2();
        let lo = u.floor();
        let denom = bump(u - lo) + bump(u - lo - 1.0);
        if denom == 0.0 {
            return 0.0;
        }
        bump(u - j as f64) / denom
    }

    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        if j < self.j_min || j > self.j_max {
            return Err(SpectralError::LevelOutOfRange(j));
        }
        let g = self.grid;
        Ok(f.map_modes(|idx| Complex64::new(self.psi(j, g.xi_norm(idx)), 0.0)))
    }

    /// `max_xi |sum_j Psi_j(xi) - 1|` over nonzero grid frequencies.
    pub fn partition_defect(&self) -> f64 {
        let g = self.grid;
        (1..g.len())
            .map(|idx| {
                let x = g.xi_norm(idx);
                let s: f64 = self.levels().map(|j| self.psi(j, x)).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `Delta_j f` on the bank built from `f`'s grid.
pub fn lp_block(f: &SpectralField, j: i32) -> Result<SpectralField> {
    LittlewoodPaleyBank::new(f.grid).block(f, j)
}

/// Rectangle-rule `L^p` norm of samples (`p = inf` gives the max).
pub fn lp_norm_samples(samples: &[f64], cell_volume: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |a, &x| a.max(x.abs()));
    }
    let mut k = KahanSum::new();
    for &x in samples {
        k.add(x.abs().powf(p));
    }
    (k.value() * cell_volume).powf(1.0 / p)
}

fn check_pq(s: f64, p: f64, q: f64) -> Result<()> {
    if !s.is_finite() || p.is_nan() || q.is_nan() || p < 1.0 || q < 1.0 {
        return Err(SpectralError::InvalidParams(format!("Besov indices s={s}, p={p}, q={q}")));
    }
    Ok(())
}

fn lq_combine(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return terms.iter().fold(0.0, |a, &x| a.max(x));
    }
    let mut k = KahanSum::new();
    for &t in terms {
        k.add(t.powf(q));
    }
    k.value().powf(1.0 / q)
}

/// Per-level terms `2^{js} || Delta_j f ||_p` over the bank (all components in one sum).
pub fn besov_terms(f: &SpectralField, s: f64, p: f64) -> Result<Vec<f64>> {
    check_pq(s, p, 1.0)?;
    let bank = LittlewoodPaleyBank::new(f.grid);
    let vol = f.grid.cell_volume();
    bank.levels()
        .map(|j| {
            let b = bank.block(f, j)?.to_samples();
            Ok(2f64.powf(j as f64 * s) * lp_norm_samples(&b, vol, p))
        })
        .collect()
}

/// `( sum_j (2^{js} ||Delta_j f||_p)^q )^{1/q}` over the available levels.
pub fn besov_norm(f: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_pq(s, p, q)?;
    Ok(lq_combine(&besov_terms(f, s, p)?, q))
}

/// Difference form `( int ||f(.+y) - f||_p^q |y|^{-n-sq} dy )^{1/q}`, `0 < s < 1`,
/// with `y` running over nonzero grid shifts in `[-L/2, L/2)^n`.
pub fn besov_difference_norm(f: &SpectralField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_pq(s, p, q)?;
    if !(0.0 < s && s < 1.0) {
        return Err(SpectralError::InvalidParams(format!("difference form needs 0<s<1, got {s}")));
    }
    let g = f.grid;
    let n = g.n() as i64;
    let vol = g.cell_volume();
    let h = g.spacing();
    let samples = f.to_samples();
    let len = g.len();
    let mut terms = Vec::with_capacity(len);
    for shift in 1..len {
        let sc = g.coords(shift);
        let mut d = [0i64; 3];
        let mut r2 = 0.0;
        for a in 0..g.dim {
            let mut v = sc[a] as i64;
            if v >= n / 2 {
                v -= n;
            }
            d[a] = v;
            r2 += (v as f64 * h).powi(2);
        }
        let r = r2.sqrt();
        let mut diff = Vec::with_capacity(samples.len());
        for c in 0..f.components {
            let comp = &samples[c * len..(c + 1) * len];
            for i in 0..len {
                let ci = g.coords(i);
                let j = g.flat_wrapped(&[ci[0] as i64 + d[0], ci[1] as i64 + d[1], ci[2] as i64 + d[2]]);
                diff.push(comp[j] - comp[i]);
            }
        }
        let dn = lp_norm_samples(&diff, vol, p);
        if q.is_infinite() {
            terms.push(dn / r.powf(s));
        } else {
            // Fold the measure dy/|y|^n into the term so lq_combine stays uniform.
            terms.push(dn / r.powf(s) * (vol / r.powi(g.dim as i32)).powf(1.0 / q));
        }
    }
    Ok(lq_combine(&terms, q))
}
